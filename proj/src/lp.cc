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

#include "hdipp/lp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hdipp/equilibrium.h"

namespace hdipp {
namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr double kReplayTolerance = 1e-9;
constexpr double kDualityGapTolerance = 1e-8;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cols_(cols), data_(rows, std::vector<double>(cols + 1, 0.0)), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i][j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i][j]; }
  double& rhs(std::size_t i) { return data_[i][cols_]; }
  double rhs(std::size_t i) const { return data_[i][cols_]; }
  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  double reduced_cost(const std::vector<double>& cost, std::size_t j) const {
    double r = cost[j];
    for (std::size_t i = 0; i < rows(); ++i) r -= cost[basis_[i]] * data_[i][j];
    return r;
  }

  void pivot(std::size_t row, std::size_t col) {
    auto& pr = data_[row];
    const double inv = 1.0 / pr[col];
    for (double& v : pr) v *= inv;
    pr[col] = 1.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == row) continue;
      const double f = data_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) data_[i][j] -= f * pr[j];
      data_[i][col] = 0.0;
    }
    basis_[row] = col;
  }

  // Bland's rule. Returns false when unbounded.
  bool optimize(const std::vector<double>& cost, const std::vector<char>& allowed,
                std::size_t& pivots) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && reduced_cost(cost, j) < -kPivotTolerance) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = rows();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows(); ++i) {
        const double a = data_[i][enter];
        if (a <= kPivotTolerance) continue;
        const double ratio = rhs(i) / a;
        if (leave == rows() || ratio < best - kPivotTolerance) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + kPivotTolerance && basis_[i] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == rows()) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

 private:
  std::size_t cols_;
  std::vector<std::vector<double>> data_;
  std::vector<std::size_t> basis_;
};

std::string label(const char* name, Reviewer k, int t) {
  return std::string(name) + "_" + std::string(reviewer_name(k)) + "^" + std::to_string(t + 1);
}

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  if (lp.lower.size() != n || lp.upper.size() != n || lp.rows.size() != lp.rhs.size()) {
    throw UsageError("linear program: inconsistent dimensions");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]) || lp.upper[j] < lp.lower[j]) {
      throw UsageError("linear program: bad variable bounds");
    }
  }

  // Shift to y = x - lower >= 0; finite upper bounds become -y_j >= -(u-l).
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].size() != n) throw UsageError("linear program: row has wrong length");
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += lp.rows[i][j] * lp.lower[j];
    a.push_back(lp.rows[i]);
    b.push_back(lp.rhs[i] - shift);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.upper[j])) continue;
    std::vector<double> row(n, 0.0);
    row[j] = -1.0;
    a.push_back(std::move(row));
    b.push_back(-(lp.upper[j] - lp.lower[j]));
  }
  const std::size_t m = a.size();
  std::size_t artificials = 0;
  for (double v : b) artificials += v >= 0.0 ? 1 : 0;
  const std::size_t surplus0 = n, art0 = n + m;
  const std::size_t cols = n + m + artificials;

  Tableau tab(m, cols);
  std::size_t next_art = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * a[i][j];
    tab.at(i, surplus0 + i) = -sign;
    tab.rhs(i) = sign * b[i];
    if (sign < 0.0) {
      tab.basis()[i] = surplus0 + i;
    } else {
      tab.at(i, next_art) = 1.0;
      tab.basis()[i] = next_art++;
    }
  }

  SimplexResult result;
  std::vector<char> allowed(cols, 1);
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t j = art0; j < cols; ++j) phase1[j] = 1.0;
  tab.optimize(phase1, allowed, result.pivots);
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] >= art0) infeasibility += tab.rhs(i);
  }
  if (infeasibility > 1e-9) {
    result.status = SimplexResult::Status::kInfeasible;
    return result;
  }
  // Pivot zero-level artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (std::abs(tab.at(i, j)) > kPivotTolerance) {
        tab.pivot(i, j);
        ++result.pivots;
        break;
      }
    }
  }
  for (std::size_t j = art0; j < cols; ++j) allowed[j] = 0;

  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j];
  if (!tab.optimize(phase2, allowed, result.pivots)) {
    result.status = SimplexResult::Status::kUnbounded;
    return result;
  }

  result.status = SimplexResult::Status::kOptimal;
  result.x = lp.lower;
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) result.x[tab.basis()[i]] += tab.rhs(i);
  }
  double constant = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    result.objective += lp.objective[j] * result.x[j];
    constant += lp.objective[j] * lp.lower[j];
  }
  // The multiplier of row i is the reduced cost of its surplus column.
  result.dual_objective = constant;
  for (std::size_t i = 0; i < m; ++i) {
    result.dual_objective += tab.reduced_cost(phase2, surplus0 + i) * b[i];
  }
  return result;
}

LpProblem assemble_lp(std::shared_ptr<const JointPrior> prior,
                      const std::array<EffortCost, 3>& costs, const LpOptions& options) {
  const CriteriaHierarchy& h = prior->hierarchy();
  const int T = h.criteria();
  if (!(options.epsilon >= 0.0) || !(options.cap > 0.0) || options.min_beta < 0.0 ||
      options.min_beta > options.cap) {
    throw UsageError("lp options: need epsilon >= 0 and 0 <= min_beta <= cap");
  }
  for (const auto& c : costs) {
    if (c.max_level() != T) throw UsageError("effort costs must cover levels 0..T");
  }
  LpProblem problem;
  problem.criteria = T;
  problem.options = options;
  problem.relevance_warning = !check_assumptions(*prior).stochastic_relevance;
  if (problem.relevance_warning && options.require_relevance) {
    throw UsageError("prior fails stochastic relevance; strict incentives cannot be guaranteed");
  }

  const Hyperparameters unit = Hyperparameters::uniform(T, 1.0, 1.0);
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    for (int level = 0; level <= T; ++level) {
      StrategyProfile profile = StrategyProfile::truthful_full_effort(h);
      profile[k].effort = level;
      const InducedJoint joint(prior, profile);
      const ExpectedPaymentReport r = expected_payment_exact(joint, unit);
      problem.expert_payment[ki].push_back(r[k].expert);
      problem.target_payment[ki].push_back(r[k].target);
    }
  }

  const std::size_t n = 6 * static_cast<std::size_t>(T);
  LinearProgram& lp = problem.program;
  lp.objective.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, options.cap);
  problem.variable_labels.resize(n);
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    for (int t = 0; t < T; ++t) {
      const auto ai = LpProblem::alpha_index(k, t, T);
      const auto bi = LpProblem::beta_index(k, t, T);
      problem.variable_labels[ai] = label("alpha", k, t);
      problem.variable_labels[bi] = label("beta", k, t);
      lp.lower[bi] = options.min_beta;
      lp.objective[ai] = problem.expert_payment[ki][static_cast<std::size_t>(T)][static_cast<std::size_t>(t)];
      lp.objective[bi] = problem.target_payment[ki][static_cast<std::size_t>(T)][static_cast<std::size_t>(t)];
    }
  }
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    const auto& ex = problem.expert_payment[ki];
    const auto& tg = problem.target_payment[ki];
    for (int level = 1; level <= T; ++level) {
      std::vector<double> row(n, 0.0);
      for (int t = 0; t < T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        const auto ul = static_cast<std::size_t>(level);
        row[LpProblem::alpha_index(k, t, T)] = ex[ul][ut] - ex[ul - 1][ut];
        row[LpProblem::beta_index(k, t, T)] = tg[ul][ut] - tg[ul - 1][ut];
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(costs[ki].marginal(level) + options.epsilon);
      problem.row_labels.push_back("marginal_" + std::string(reviewer_name(k)) + "_" +
                                   std::to_string(level));
    }
    if (options.include_ir) {
      std::vector<double> row(n, 0.0);
      for (int t = 0; t < T; ++t) {
        row[LpProblem::alpha_index(k, t, T)] = ex[static_cast<std::size_t>(T)][static_cast<std::size_t>(t)];
        row[LpProblem::beta_index(k, t, T)] = tg[static_cast<std::size_t>(T)][static_cast<std::size_t>(t)];
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(costs[ki].total(T) + options.epsilon);
      problem.row_labels.push_back("participation_" + std::string(reviewer_name(k)));
    }
  }
  return problem;
}

LpSolution solve_hyperparameters(const LpProblem& problem) {
  const LinearProgram& lp = problem.program;
  const SimplexResult r = solve_simplex(lp);
  if (r.status == SimplexResult::Status::kInfeasible) {
    std::ostringstream os;
    os << "hyperparameter program is infeasible (" << lp.rows.size()
       << " constraints, weights capped at " << problem.options.cap << ")";
    throw UsageError(os.str());
  }
  if (r.status == SimplexResult::Status::kUnbounded) {
    throw UsageError("hyperparameter program is unbounded");
  }

  LpSolution out;
  out.values = r.x;
  out.objective = r.objective;
  out.duality_gap = std::abs(r.objective - r.dual_objective) / std::max(1.0, std::abs(r.objective));
  if (out.duality_gap > kDualityGapTolerance) {
    throw UsageError("hyperparameter program: duality gap " + std::to_string(out.duality_gap) +
                     " exceeds tolerance");
  }

  // Replay every constraint on the returned point.
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    const double scale = std::max(1.0, std::abs(lp.upper[j]));
    if (r.x[j] < lp.lower[j] - kReplayTolerance * scale ||
        r.x[j] > lp.upper[j] + kReplayTolerance * scale) {
      throw UsageError("hyperparameter program: bound violated by " + problem.variable_labels[j]);
    }
    if (r.x[j] >= lp.upper[j] * (1.0 - 1e-12)) out.binding_caps.push_back(problem.variable_labels[j]);
  }
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    double lhs = 0.0, scale = std::max(1.0, std::abs(lp.rhs[i]));
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      lhs += lp.rows[i][j] * r.x[j];
      scale = std::max(scale, std::abs(lp.rows[i][j] * r.x[j]));
    }
    const double slack = lhs - lp.rhs[i];
    if (slack < -kReplayTolerance * scale) {
      throw UsageError("hyperparameter program: constraint " + problem.row_labels[i] +
                       " violated on replay");
    }
    out.slacks.push_back(slack);
  }

  const int T = problem.criteria;
  out.hyperparameters = Hyperparameters::uniform(T, 0.0, 0.0);
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    for (int t = 0; t < T; ++t) {
      out.hyperparameters.alpha[ki][static_cast<std::size_t>(t)] =
          std::max(0.0, r.x[LpProblem::alpha_index(k, t, T)]);
      out.hyperparameters.beta[ki][static_cast<std::size_t>(t)] =
          std::max(0.0, r.x[LpProblem::beta_index(k, t, T)]);
    }
  }
  return out;
}

}  // namespace hdipp
