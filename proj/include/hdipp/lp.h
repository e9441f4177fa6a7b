// Copyright 2026 The hdipp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Cheapest weights that make each extra criterion of effort pay for itself,
// and a small dense simplex solver to find them.

#ifndef HDIPP_LP_H_
#define HDIPP_LP_H_

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hdipp/mechanism.h"
#include "hdipp/probability.h"
#include "hdipp/reviewers.h"

namespace hdipp {

// minimize c.x  subject to  rows[i].x >= rhs[i],  lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct SimplexResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Objective of the dual solution read off the final tableau.
  double dual_objective = 0.0;
  std::size_t pivots = 0;
};

// Two-phase dense tableau simplex with Bland's rule, so identical inputs
// always pivot identically.
SimplexResult solve_simplex(const LinearProgram& lp);

struct LpOptions {
  double epsilon = 1e-3;
  bool include_ir = false;
  double cap = 1e6;
  // Lower bound on every target weight. Without it the solver may zero the
  // target weights, and then misreporting costs nothing.
  double min_beta = 0.1;
  // Refuse priors that fail the relevance check instead of flagging them.
  bool require_relevance = false;
};

struct LpProblem {
  int criteria = 0;
  // Variables: for each reviewer A, B, C, alpha^1..alpha^T then
  // beta^1..beta^T.
  LinearProgram program;
  std::vector<std::string> variable_labels;
  std::vector<std::string> row_labels;
  // Unweighted expected components at every effort level:
  // expert_payment[k][level][t], target_payment[k][level][t].
  std::array<std::vector<std::vector<double>>, 3> expert_payment;
  std::array<std::vector<std::vector<double>>, 3> target_payment;
  LpOptions options;
  bool relevance_warning = false;

  static std::size_t alpha_index(Reviewer k, int t, int criteria) {
    return static_cast<std::size_t>(index_of(k) * 2 * criteria + t);
  }
  static std::size_t beta_index(Reviewer k, int t, int criteria) {
    return static_cast<std::size_t>(index_of(k) * 2 * criteria + criteria + t);
  }
};

struct LpSolution {
  Hyperparameters hyperparameters;
  std::vector<double> values;
  double objective = 0.0;
  double duality_gap = 0.0;
  // rows[i].x - rhs[i] for every constraint, in problem row order.
  std::vector<double> slacks;
  std::vector<std::string> binding_caps;
};

// Coefficients come from exact expected payments of reviewer k at every
// effort level with truthful reporting, peers at full effort.
LpProblem assemble_lp(std::shared_ptr<const JointPrior> prior,
                      const std::array<EffortCost, 3>& costs,
                      const LpOptions& options = {});

// Throws UsageError with diagnostics when infeasible or unbounded, or when
// the returned point fails the constraint replay.
LpSolution solve_hyperparameters(const LpProblem& problem);

}  // namespace hdipp

#endif  // HDIPP_LP_H_
