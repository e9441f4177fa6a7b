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

// The two-round prediction game run by every reviewer on their target, and
// the per-criterion payment that scores it.
//
// Roles are cyclic: A forecasts B's scores with help from C's, B forecasts C
// with help from A, and C forecasts A with help from B.

#ifndef HDIPP_MECHANISM_H_
#define HDIPP_MECHANISM_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hdipp/probability.h"
#include "hdipp/reviewers.h"

namespace hdipp {

inline Reviewer target_of(Reviewer expert) { return reviewer_at(index_of(expert) + 1); }
inline Reviewer source_of(Reviewer expert) { return reviewer_at(index_of(expert) + 2); }
// The reviewer whose target is `target`.
inline Reviewer expert_of(Reviewer target) { return reviewer_at(index_of(target) + 2); }

struct RoleAssignment {
  Reviewer expert;
  Reviewer target;
  Reviewer source;

  static std::array<RoleAssignment, 3> cyclic();
};

// Per-reviewer, per-criterion weights on the expert and target components.
struct Hyperparameters {
  std::array<std::vector<double>, 3> alpha;
  std::array<std::vector<double>, 3> beta;

  static Hyperparameters uniform(int criteria, double alpha, double beta);
  double a(Reviewer k, int t) const {
    return alpha[static_cast<std::size_t>(index_of(k))][static_cast<std::size_t>(t)];
  }
  double b(Reviewer k, int t) const {
    return beta[static_cast<std::size_t>(index_of(k))][static_cast<std::size_t>(t)];
  }
  // Throws UsageError on wrong shape, negative or non-finite weights.
  void validate(int criteria) const;
};

enum class ForecastStage { kFirst = 0, kSecond = 1 };

// Every forecast an expert would give, for every criterion and stage, as a
// function of what the expert can see at that point: their own
// effort-informed signals and the source's reports revealed so far (criteria
// below t for the first forecast, through t for the second). Keys are
// mixed-radix over (expert signals ascending, then source reports ascending).
class ForecastBook {
 public:
  using Stages = std::array<std::vector<Distribution>, 2>;
  // tables[expert][criterion][stage][key]
  using Tables = std::array<std::vector<Stages>, 3>;

  ForecastBook(CriteriaHierarchy hierarchy, std::array<int, 3> expert_effort,
               Tables tables);

  // Bayes posteriors of the target's report under `joint`. Keys whose
  // conditioning event has probability zero map to the uniform forecast;
  // they are never consulted when play follows `joint`.
  static ForecastBook honest(const InducedJoint& joint);

  const CriteriaHierarchy& hierarchy() const { return hierarchy_; }
  int expert_effort(Reviewer expert) const {
    return effort_[static_cast<std::size_t>(index_of(expert))];
  }
  std::size_t key_count(Reviewer expert, int criterion, ForecastStage stage) const;
  std::size_t key(Reviewer expert, int criterion, ForecastStage stage,
                  std::span<const int> expert_signals,
                  std::span<const int> source_reports) const;
  const Distribution& entry(Reviewer expert, int criterion, ForecastStage stage,
                            std::size_t key) const;
  void set_entry(Reviewer expert, int criterion, ForecastStage stage,
                 std::size_t key, Distribution forecast);
  // Looks up the forecast; only the first expert_effort signals and the
  // stage-visible source reports are read.
  const Distribution& lookup(Reviewer expert, int criterion, ForecastStage stage,
                             std::span<const int> expert_signals,
                             std::span<const int> source_reports) const;

  // Clamps every forecast to at least `floor` and renormalizes.
  void apply_floor(double floor = kForecastFloor);
  // Takes over `expert`'s forecasts (and effort) from `other`.
  void replace_expert(Reviewer expert, const ForecastBook& other);

  const Tables& tables() const { return tables_; }

 private:
  CriteriaHierarchy hierarchy_;
  std::array<int, 3> effort_;
  Tables tables_;
};

struct Prediction {
  Reviewer expert;
  Reviewer target;
  Reviewer source;
  int criterion;
  Distribution first;
  Distribution second;
};

enum class RevealKind { kFirstElicited, kRevealed, kSecondElicited };

struct RevealEvent {
  Reviewer expert;
  int criterion;
  RevealKind kind;
};

struct Transcript {
  std::uint64_t seed = 0;
  std::array<std::vector<int>, 3> reports;
  // Ordered by expert (A, B, C), then criterion ascending.
  std::vector<Prediction> predictions;
  // Per expert game: first forecast, source reveal, second forecast, for
  // each criterion in turn.
  std::vector<RevealEvent> reveal_log;

  const Prediction& prediction(Reviewer expert, int criterion) const;
};

// Plays the three expert games on fixed reports. `true_signals[k]` holds at
// least expert_effort(k) entries.
Transcript play_round(const ForecastBook& books,
                      const std::array<std::vector<int>, 3>& true_signals,
                      const std::array<std::vector<int>, 3>& reports);

// Log score of k's two forecasts of their target's criterion-t report.
double expert_component(const Transcript& transcript, Reviewer k, int t);
// Improvement of k's expert's second forecast over the first, scored on k's
// own criterion-t report.
double target_component(const Transcript& transcript, Reviewer k, int t);
double criterion_payment(const Transcript& transcript, const Hyperparameters& hp,
                         Reviewer k, int t);

struct PaymentBreakdown {
  Reviewer reviewer = Reviewer::kA;
  std::vector<double> expert;
  std::vector<double> target;
  std::vector<double> weighted;
  double total = 0.0;
};

PaymentBreakdown payment_breakdown(const Transcript& transcript,
                                   const Hyperparameters& hp, Reviewer k);

struct PaymentTotals {
  std::array<double, 3> per_reviewer{};
  double aggregate = 0.0;
};

PaymentTotals total_payment(std::span<const PaymentBreakdown> breakdowns);

struct RoundResult {
  Transcript transcript;
  std::array<PaymentBreakdown, 3> payments;
};

// Draws signals, completes them, samples reports through each reporting map
// and plays the round. Forecasts come from `books` (honest books of `joint`
// when omitted). Identical seeds give identical rounds.
RoundResult run_review_round(const InducedJoint& joint, const Hyperparameters& hp,
                             std::uint64_t seed);
RoundResult run_review_round(const InducedJoint& joint, const Hyperparameters& hp,
                             std::uint64_t seed, const ForecastBook& books);

}  // namespace hdipp

#endif  // HDIPP_MECHANISM_H_
