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

// Reviewer behaviour: effort, best-guess completion of unfinished criteria,
// per-criterion reporting strategies and the induced joint distribution of
// true and reported signals.

#ifndef HDIPP_REVIEWERS_H_
#define HDIPP_REVIEWERS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hdipp/probability.h"

namespace hdipp {

// Total effort cost e(t) of completing criteria 1..t; e(0) = 0 and strictly
// increasing.
class EffortCost {
 public:
  EffortCost() = default;
  explicit EffortCost(std::vector<double> costs);

  int max_level() const { return static_cast<int>(costs_.size()) - 1; }
  double total(int level) const { return costs_.at(static_cast<std::size_t>(level)); }
  // e(t) - e(t-1), t >= 1.
  double marginal(int level) const { return total(level) - total(level - 1); }
  std::span<const double> costs() const { return costs_; }

 private:
  std::vector<double> costs_;
};

// Row-stochastic matrix mapping a completed signal to a reported signal on
// one criterion: row = completed value, column = reported value.
class ReportingMap {
 public:
  ReportingMap() = default;
  explicit ReportingMap(std::vector<std::vector<double>> rows);

  static ReportingMap identity(int size);
  static ReportingMap constant(int size, int value);
  // Deterministic map completed value v -> targets[v].
  static ReportingMap deterministic(std::span<const int> targets);

  int size() const { return static_cast<int>(rows_.size()); }
  double operator()(int completed, int reported) const {
    return rows_[static_cast<std::size_t>(completed)][static_cast<std::size_t>(reported)];
  }
  const std::vector<double>& row(int completed) const {
    return rows_[static_cast<std::size_t>(completed)];
  }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  bool is_identity() const;
  bool is_deterministic() const;
  // Image of each completed value; requires is_deterministic().
  std::vector<int> targets() const;

 private:
  std::vector<std::vector<double>> rows_;
};

// theta_k factored per criterion.
struct ReportingStrategy {
  std::vector<ReportingMap> per_criterion;

  static ReportingStrategy truthful(const CriteriaHierarchy& h);
  static ReportingStrategy constant(const CriteriaHierarchy& h,
                                    std::span<const int> values);
  bool is_truthful() const;
};

enum class BestGuessRule { kConditionalMode };

struct BestGuessPolicy {
  BestGuessRule rule = BestGuessRule::kConditionalMode;
};

enum class PredictionPolicy { kHonestBayesian, kForecastTable };

struct ReviewerStrategy {
  int effort = 0;
  ReportingStrategy reporting;
  BestGuessPolicy best_guess;
  PredictionPolicy prediction = PredictionPolicy::kHonestBayesian;
};

struct StrategyProfile {
  std::array<ReviewerStrategy, 3> reviewers;

  const ReviewerStrategy& operator[](Reviewer r) const {
    return reviewers[static_cast<std::size_t>(index_of(r))];
  }
  ReviewerStrategy& operator[](Reviewer r) {
    return reviewers[static_cast<std::size_t>(index_of(r))];
  }

  // Every reviewer completes all criteria and reports truthfully.
  static StrategyProfile truthful_full_effort(const CriteriaHierarchy& h);
  // Every reviewer exerts no effort and always reports `value` (clamped to
  // each criterion's scale).
  static StrategyProfile zero_effort_constant(const CriteriaHierarchy& h,
                                              int value = 0);
  void validate(const CriteriaHierarchy& h) const;
};

// g^{t'|t}: the default guess is the conditional mode of X_k^{t'} given the
// observed lower criteria, lowest signal on ties. Throws UsageError when
// target_criterion is not above every observed criterion.
int best_guess(const JointPrior& prior, Reviewer reviewer,
               std::span<const int> observed, int target_criterion);

// Where a variable of the induced joint comes from.
enum class VarKind {
  kTrue,       // effort-informed signal drawn from the prior
  kCompleted,  // true signal on completed criteria, best guess above
  kReported,   // output of the reporting strategy
};

struct Variable {
  Reviewer reviewer;
  int criterion;
  VarKind kind;
};

// Q = theta_A theta_B theta_C P, with best-guess completion applied before
// each reporting map. Marginals over any list of true, completed and
// reported variables are computed exactly by enumeration.
class InducedJoint {
 public:
  InducedJoint(std::shared_ptr<const JointPrior> prior, StrategyProfile profile);

  const JointPrior& prior() const { return *prior_; }
  std::shared_ptr<const JointPrior> prior_ptr() const { return prior_; }
  const StrategyProfile& profile() const { return profile_; }
  int criteria() const { return prior_->criteria(); }

  // Joint table over `vars`, axes in the given order.
  Table marginal(std::span<const Variable> vars) const;

  // Completed signal vector of reviewer r for own-signal index `own`
  // (row-major over the reviewer's T criteria).
  std::span<const int> completed(Reviewer r, std::size_t own) const;

  // Dense tensor over all 6T variables: true signals (A, B, C) followed by
  // reported signals (A, B, C). Throws CapacityError above `max_cells`.
  Table full_tensor(std::size_t max_cells = std::size_t{1} << 24) const;

 private:
  std::shared_ptr<const JointPrior> prior_;
  StrategyProfile profile_;
  std::size_t own_cells_ = 0;
  std::array<std::vector<int>, 3> completed_;
};

// One joint draw from the prior, with best-guess completion.
struct RealizedSignals {
  std::array<std::vector<int>, 3> true_signals;
  std::array<std::vector<int>, 3> completed;
};

// Draws a prior cell by inverse CDF using one uniform from `rng_seed`'s
// stream.
RealizedSignals realize_signals(const InducedJoint& joint, std::uint64_t rng_seed);

// Decomposes a flat prior index into the three own-signal indices.
std::array<std::size_t, 3> split_cell(const JointPrior& prior, std::size_t flat);
// Mixed-radix decode of an own-signal index into T signals.
void decode_own(const CriteriaHierarchy& h, std::size_t own, std::span<int> out);

// Q(X^_target^t | expert's effort-informed signals x^{[t_expert]}, source
// reports through criterion `source_through` (exclusive count)).
Distribution honest_prediction(const InducedJoint& joint, Reviewer expert,
                               Reviewer target, Reviewer source,
                               std::span<const int> expert_signals,
                               std::span<const int> source_reports,
                               int predict_criterion);

}  // namespace hdipp

#endif  // HDIPP_REVIEWERS_H_
