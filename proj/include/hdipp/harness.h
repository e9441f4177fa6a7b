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

// End-to-end plumbing: seeded test priors, the credit ledger, a full
// conference round (auction -> review -> payout) and JSON-configured
// scenarios.

#ifndef HDIPP_HARNESS_H_
#define HDIPP_HARNESS_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdipp/auction.h"
#include "hdipp/equilibrium.h"
#include "hdipp/lp.h"
#include "hdipp/mechanism.h"
#include "hdipp/probability.h"
#include "hdipp/reviewers.h"
#include "hdipp/slots.h"

namespace hdipp {

struct PriorGenOptions {
  double support_floor = 1e-4;
  int max_rejects = 200;
  // Extra margin on top of plain relevance so that strict incentives are
  // numerically visible.
  double min_relevance_gap = 0.01;
};

// Draws a prior that factors across criteria: criterion t of all three
// reviewers comes from its own random 3-way table. Every entry is at least
// support_floor, and draws are rejected until check_assumptions passes with
// the requested relevance margin. Deterministic per seed. Throws
// ProbabilityError (carrying the last report) after max_rejects draws.
JointPrior generate_random_prior(const CriteriaHierarchy& hierarchy, std::uint64_t seed,
                                 const PriorGenOptions& options = {});

// e(0) = 0 and strictly increasing steps drawn from [0.2, 1] * step_scale.
EffortCost generate_increasing_costs(int criteria, std::uint64_t seed, double step_scale);

enum class LedgerKind { kAuctionDebit, kReviewCredit };

struct LedgerEntry {
  int round = 0;
  std::string paper_id;
  std::string agent_id;
  LedgerKind kind = LedgerKind::kAuctionDebit;
  double amount = 0.0;  // signed: debits are negative
};

// Append-only; balances may go negative (debt carried between rounds).
class CreditLedger {
 public:
  void append(LedgerEntry entry);
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  double balance(const std::string& agent) const;
  std::map<std::string, double> balances() const;

 private:
  std::vector<LedgerEntry> entries_;
};

struct ConferenceInput {
  int round = 1;
  std::vector<Bid> bids;
  std::vector<AuthorModel> authors;
  std::shared_ptr<const JointPrior> prior;
  std::array<EffortCost, 3> costs;
  Hyperparameters hyperparameters;
  // Behaviour of every reviewer triplet.
  StrategyProfile profile;
  // Either a fixed slot count or a slot-planner input (bids are taken from
  // `bids`; the planner's matching also assigns reviewers).
  std::optional<int> fixed_slots;
  std::optional<SlotPlanInput> planner;
  // Reviewer pool used when no planner is given: paper i of the winners gets
  // pool[3i], pool[3i+1], pool[3i+2] (wrapping).
  std::vector<std::string> reviewer_pool;
  std::uint64_t seed = 0;
};

struct PaperRound {
  std::string paper_id;
  std::string author_id;
  std::array<std::string, 3> reviewers;
  RoundResult review;
  std::array<double, 3> payout{};
  bool accepted = false;
  double author_utility = 0.0;  // delta * v - price
};

struct ConferenceReport {
  int round = 0;
  std::optional<SlotPlan> plan;
  int slots = 0;
  AuctionOutcome auction;
  std::vector<PaperRound> papers;
  double revenue = 0.0;
  double total_payout = 0.0;
  double surplus = 0.0;
  // Realized utilities: authors (acceptance value minus price) and reviewers
  // (payment minus effort cost), summed over papers.
  std::map<std::string, double> author_utility;
  std::map<std::string, double> reviewer_utility;
};

ConferenceReport run_full_conference_round(const ConferenceInput& input,
                                           CreditLedger& ledger);

// Parsed scenario. See README for the JSON layout.
struct ScenarioConfig {
  CriteriaHierarchy hierarchy;
  std::optional<std::string> prior_file;
  std::uint64_t prior_seed = 0;
  PriorGenOptions prior_options;
  std::array<EffortCost, 3> costs;
  std::optional<std::string> hyperparameter_file;
  std::optional<Hyperparameters> hyperparameters;
  LpOptions lp_options;
  std::vector<std::string> checks;
  std::size_t max_deviations = kDefaultEnumerationBudget;
  // Optional conference stage.
  std::optional<ConferenceInput> conference;
  std::uint64_t seed = 0;
};

// Relative file paths in the config are resolved against base_dir.
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = ".");

struct ScenarioResult {
  int exit_code = 0;
  std::string report_json;
  std::string summary_csv;     // one row per reviewer role
  std::string conference_csv;  // one row per reviewed paper, if any
  std::vector<std::string> failures;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace hdipp

#endif  // HDIPP_HARNESS_H_
