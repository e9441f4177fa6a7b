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

// Choosing how many review slots to sell: the auction revenue at n slots
// has to cover the expected reviewer payouts of the n matched papers, and
// among the affordable n we trade match quality against volume.

#ifndef HDIPP_SLOTS_H_
#define HDIPP_SLOTS_H_

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hdipp/auction.h"

namespace hdipp {

// Papers x reviewers score matrix with ids for deterministic tie-breaks.
struct MatchQuality {
  std::vector<std::string> papers;
  std::vector<std::string> reviewers;
  std::vector<std::vector<double>> scores;  // [paper][reviewer]
  int capacity = 1;                         // papers per reviewer

  void validate() const;
  int paper_index(const std::string& id) const;
};

struct Assignment {
  // Paper indices into MatchQuality::papers, in the order requested.
  std::vector<int> papers;
  // Three distinct reviewer indices per paper.
  std::vector<std::array<int, 3>> reviewers;
  double total_score = 0.0;
  double mean_score = 0.0;
};

// Highest-score-first greedy assignment of three reviewers to each listed
// paper, ties by (paper id, reviewer id). Gaps left by the greedy pass are
// filled along augmenting paths, then single swaps are applied until no
// exchange raises the total. Throws CapacityError when reviewer capacity
// cannot cover every paper.
Assignment default_matcher(const MatchQuality& quality, std::span<const int> papers);

// Matches the first n papers of the bid ranking.
using Matcher = std::function<Assignment(std::span<const int> papers)>;

struct SlotPlanInput {
  std::vector<Bid> bids;
  MatchQuality quality;
  // Expected payout to each reviewer for reviewing each paper,
  // [paper][reviewer] in MatchQuality order.
  std::vector<std::vector<double>> expected_costs;
  double lambda = 0.0;
  double min_avg_score = -1e300;
  // Defaults to default_matcher on `quality`.
  Matcher matcher;
};

struct SlotCandidate {
  int n = 0;
  bool matched = false;
  double revenue = 0.0;  // price at n slots times n
  double cost = 0.0;     // sum of expected payouts
  bool budget_ok = false;
  double mean_score = 0.0;
  bool score_ok = false;
  double objective = 0.0;
  std::string note;
};

struct SlotPlan {
  int chosen = 0;
  std::vector<int> feasible;
  double objective = 0.0;
  std::vector<SlotCandidate> candidates;
  Assignment assignment;
  std::vector<std::string> winners;
  std::string note;
};

// Keeps n with price(n) * n >= cost(n) and mean score >= the threshold, then
// maximizes mean score + lambda * n, ties to larger n. No feasible n yields a
// zero-slot plan with a note.
SlotPlan plan_slots(const SlotPlanInput& input);

}  // namespace hdipp

#endif  // HDIPP_SLOTS_H_
