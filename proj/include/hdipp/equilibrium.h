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

// Exact expected payments and utilities, marginal payments for one more
// completed criterion, and brute-force equilibrium checks.

#ifndef HDIPP_EQUILIBRIUM_H_
#define HDIPP_EQUILIBRIUM_H_

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hdipp/mechanism.h"
#include "hdipp/probability.h"
#include "hdipp/reviewers.h"

namespace hdipp {

inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

struct ReviewerExpectation {
  Reviewer reviewer = Reviewer::kA;
  // Unweighted per-criterion components, by enumeration of realized
  // payments.
  std::vector<double> expert;
  std::vector<double> target;
  // Same quantities from their information-theoretic forms: negative
  // conditional entropies and a conditional mutual information.
  std::vector<double> expert_closed;
  std::vector<double> target_closed;
  double total = 0.0;
  double total_closed = 0.0;
  // Largest |r_k| over realizations with positive probability.
  double max_abs_realized = 0.0;
};

struct ExpectedPaymentReport {
  std::array<ReviewerExpectation, 3> reviewers;
  double aggregate = 0.0;
  // Closed forms assume every forecast is the Bayes posterior under the
  // enumerated joint; they are skipped when other forecasts are supplied.
  bool closed_form_valid = false;
  double max_discrepancy = 0.0;
  std::size_t realizations = 0;

  const ReviewerExpectation& operator[](Reviewer k) const {
    return reviewers[static_cast<std::size_t>(index_of(k))];
  }
};

// Enumerates every prior cell and every reported-signal combination the
// reporting maps allow, plays the round, and averages the payments. Throws
// CapacityError past `max_realizations`.
ExpectedPaymentReport expected_payment_exact(
    const InducedJoint& joint, const Hyperparameters& hp,
    std::size_t max_realizations = kDefaultEnumerationBudget);
// As above, with forecasts taken from `books` instead of the honest books of
// `joint`.
ExpectedPaymentReport expected_payment_exact(
    const InducedJoint& joint, const Hyperparameters& hp, const ForecastBook& books,
    std::size_t max_realizations = kDefaultEnumerationBudget);

// Expected payment minus the cost of the reviewer's effort level.
double expected_utility(const ExpectedPaymentReport& report, Reviewer k,
                        const EffortCost& cost, int effort);
double expected_utility(const InducedJoint& joint, const Hyperparameters& hp,
                        Reviewer k, const EffortCost& cost);

struct CriterionMarginal {
  double expert_formula = 0.0;
  double target_formula = 0.0;
  double expert_difference = 0.0;
  double target_difference = 0.0;
};

// Gain to reviewer k from completing criterion `effort` (1..T) instead of
// stopping at effort-1, with peers at full effort and truthful.
struct MarginalReport {
  Reviewer reviewer = Reviewer::kA;
  int effort = 1;
  std::vector<CriterionMarginal> criteria;
  double weighted_formula = 0.0;
  double weighted_difference = 0.0;
  double marginal_cost = 0.0;
  double max_discrepancy = 0.0;
  // Strict positivity at the completed criterion is only promised on priors
  // that pass the relevance check.
  bool relevance_warning = false;
};

MarginalReport marginal_payments(std::shared_ptr<const JointPrior> prior,
                                 const Hyperparameters& hp, Reviewer k, int effort,
                                 const EffortCost* cost = nullptr);

// A pure reviewing strategy: effort plus a deterministic map per criterion.
struct Deviation {
  int effort = 0;
  std::vector<std::vector<int>> maps;

  ReviewerStrategy to_strategy(const CriteriaHierarchy& h) const;
  std::string describe() const;
};

struct BestResponseOptions {
  std::size_t max_deviations = kDefaultEnumerationBudget;
  bool prediction_spot_check = true;
};

struct BestResponseResult {
  Reviewer reviewer = Reviewer::kA;
  double designated_utility = 0.0;
  double best_deviation_utility = 0.0;
  Deviation best_deviation;
  // designated - best deviation; > 0 means the designated strategy is the
  // unique best response within the class.
  double gap = 0.0;
  std::size_t enumerated = 0;
  // Largest change in expected expert score from perturbing one of the
  // reviewer's own forecasts; negative when honest forecasting is strictly
  // better.
  double prediction_spot_check_gain = 0.0;
  std::size_t prediction_spot_checks = 0;
};

// Evaluates every effort level combined with every deterministic
// per-criterion reporting map for reviewer k, peers fixed at `designated`.
// Peers forecast with the designated profile's posteriors (floored); k
// forecasts honestly given their own effort.
BestResponseResult best_response_search(std::shared_ptr<const JointPrior> prior,
                                        const Hyperparameters& hp, Reviewer k,
                                        const StrategyProfile& designated,
                                        const EffortCost& cost,
                                        const BestResponseOptions& options = {});

// Slow path for the same quantity as one entry of best_response_search:
// builds the deviating profile and enumerates realized payments.
double deviation_utility_by_enumeration(std::shared_ptr<const JointPrior> prior,
                                        const Hyperparameters& hp, Reviewer k,
                                        const StrategyProfile& designated,
                                        const EffortCost& cost,
                                        const Deviation& deviation);

struct PropertyVerdict {
  // (i) zero effort, constant reports.
  bool zero_payment_pass = false;
  double max_zero_expected = 0.0;
  double max_zero_realized = 0.0;
  // (ii) truthful full effort has positive utility.
  bool ir_pass = false;
  std::array<double, 3> informative_utility{};
  std::array<double, 3> uninformative_utility{};
  // (iii) informative beats uninformative per reviewer and in aggregate.
  bool dominance_pass = false;
  // (iv) truthful full effort is the unique best response for everyone.
  bool strict_bne_pass = false;
  std::array<BestResponseResult, 3> best_responses;
  bool relevance = false;
  // Equality-level comparisons used when relevance fails.
  bool weak_only = false;
  std::vector<std::string> notes;

  bool all_pass() const {
    return zero_payment_pass && ir_pass && dominance_pass && strict_bne_pass;
  }
};

// With search_deviations = false the (expensive) best-response search is
// skipped and strict_bne_pass stays false.
PropertyVerdict verify_equilibrium_properties(std::shared_ptr<const JointPrior> prior,
                                              const Hyperparameters& hp,
                                              const std::array<EffortCost, 3>& costs,
                                              const BestResponseOptions& options = {},
                                              bool search_deviations = true);

}  // namespace hdipp

#endif  // HDIPP_EQUILIBRIUM_H_
