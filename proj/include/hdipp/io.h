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

// JSON encoding of every artifact the CLI reads or writes. Parsers throw
// UsageError on malformed input; doubles keep full precision.

#ifndef HDIPP_IO_H_
#define HDIPP_IO_H_

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "hdipp/auction.h"
#include "hdipp/equilibrium.h"
#include "hdipp/harness.h"
#include "hdipp/lp.h"
#include "hdipp/mechanism.h"
#include "hdipp/probability.h"
#include "hdipp/reviewers.h"
#include "hdipp/slots.h"

namespace hdipp {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json parse_json(const std::string& text, const std::string& what);
Json load_json(const std::string& path);

// Fixed six-decimal rendering for CSV tables.
std::string csv_number(double v);

// {"alphabet_sizes": [...], "labels": [...]?, "tensor": [...]}
Json to_json(const JointPrior& prior);
JointPrior prior_from_json(const Json& j);
CriteriaHierarchy hierarchy_from_json(const Json& j);

// {"alpha": {"A": [...], ...}, "beta": {...}}
Json to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const Json& j);

// {"A": [e0, ..., eT], "B": [...], "C": [...]}
Json to_json(const std::array<EffortCost, 3>& costs);
std::array<EffortCost, 3> costs_from_json(const Json& j);

// {"A": {"effort": L, "reporting": [[target per signal], ...] | "truthful"}}
Json to_json(const StrategyProfile& profile);
StrategyProfile profile_from_json(const Json& j, const CriteriaHierarchy& h);

// [{"paper_id", "author_id", "amount"}]
Json to_json(const std::vector<Bid>& bids);
std::vector<Bid> bids_from_json(const Json& j);

// [{"author_id", "value", "papers": {"P1": eta}}]
std::vector<AuthorModel> authors_from_json(const Json& j);

// {"papers": [...], "reviewers": [...], "scores": [[...]], "capacity": c}
MatchQuality match_quality_from_json(const Json& j);
// [[...]] per paper, per reviewer
std::vector<std::vector<double>> matrix_from_json(const Json& j, const std::string& what);

Json to_json(const AssumptionReport& report);
Json to_json(const AuctionOutcome& outcome);
Json to_json(const TruthfulnessReport& report);
Json to_json(const Transcript& transcript);
Json to_json(const RoundResult& round);
Json to_json(const ExpectedPaymentReport& report);
Json to_json(const MarginalReport& report);
Json to_json(const BestResponseResult& result);
Json to_json(const PropertyVerdict& verdict);
Json to_json(const LpSolution& solution, const LpProblem& problem);
Json to_json(const SlotPlan& plan, const MatchQuality& quality);
Json to_json(const ConferenceReport& report);
Json to_json(const CreditLedger& ledger);

}  // namespace hdipp

#endif  // HDIPP_IO_H_
