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

#include "hdipp/auction.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "hdipp/common.h"

namespace hdipp {

void AuthorModel::validate() const {
  if (!std::isfinite(value_per_acceptance) || value_per_acceptance < 0.0) {
    throw UsageError("author " + author_id + ": value must be finite and nonnegative");
  }
  for (const auto& [paper, eta] : acceptance_prob) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw UsageError("author " + author_id + ": acceptance probability of " + paper +
                       " outside [0, 1]");
    }
  }
}

std::vector<Bid> rank_bids(std::span<const Bid> bids) {
  std::vector<Bid> ranked(bids.begin(), bids.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const Bid& a, const Bid& b) {
    if (a.amount != b.amount) return a.amount > b.amount;
    return a.paper_id < b.paper_id;
  });
  return ranked;
}

AuctionOutcome run_vcg(std::span<const Bid> bids, int slots) {
  if (slots <= 0) throw UsageError("auction needs at least one slot");
  if (bids.empty()) throw UsageError("auction needs at least one bid");
  std::set<std::string> seen;
  for (const auto& b : bids) {
    if (!std::isfinite(b.amount) || b.amount < 0.0) {
      throw UsageError("bid for " + b.paper_id + " must be finite and nonnegative");
    }
    if (!seen.insert(b.paper_id).second) {
      throw UsageError("paper " + b.paper_id + " has more than one bid");
    }
  }
  const std::vector<Bid> ranked = rank_bids(bids);
  const std::size_t p = static_cast<std::size_t>(slots);
  const std::size_t won = std::min(p, ranked.size());

  AuctionOutcome out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < won) {
      out.winners.push_back(ranked[i].paper_id);
    } else {
      out.losing_bids.push_back(ranked[i]);
    }
  }
  // No reserve: with no losing bid the slots are free.
  out.clearing_price = ranked.size() > p ? ranked[p].amount : 0.0;
  out.revenue = static_cast<double>(won) * out.clearing_price;
  return out;
}

double author_expected_utility(const AuthorModel& model, const std::string& paper_id,
                               const AuctionOutcome& outcome) {
  const bool won = std::find(outcome.winners.begin(), outcome.winners.end(), paper_id) !=
                   outcome.winners.end();
  const bool lost = std::any_of(outcome.losing_bids.begin(), outcome.losing_bids.end(),
                                [&](const Bid& b) { return b.paper_id == paper_id; });
  if (!won && !lost) throw UsageError("paper " + paper_id + " was not in the auction");
  const auto it = model.acceptance_prob.find(paper_id);
  if (it == model.acceptance_prob.end()) {
    throw UsageError("author " + model.author_id + " has no acceptance probability for " +
                     paper_id);
  }
  if (!won) return 0.0;
  return model.value_per_acceptance * it->second - outcome.clearing_price;
}

TruthfulnessReport verify_bid_truthfulness(std::span<const AuthorModel> models, int slots,
                                           double resolution) {
  std::vector<Bid> truthful;
  for (const auto& m : models) {
    m.validate();
    if (m.acceptance_prob.size() != 1) {
      throw UsageError("truthfulness check expects exactly one paper per author");
    }
    const auto& [paper, eta] = *m.acceptance_prob.begin();
    truthful.push_back({paper, m.author_id, m.value_per_acceptance * eta});
  }
  std::vector<double> grid = {0.0};
  for (const auto& b : truthful) {
    grid.push_back(b.amount);
    grid.push_back(b.amount + resolution);
    grid.push_back(std::max(0.0, b.amount - resolution));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  TruthfulnessReport report;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string& paper = truthful[i].paper_id;
    const double honest =
        author_expected_utility(models[i], paper, run_vcg(truthful, slots));
    double worst = 0.0;
    for (double g : grid) {
      std::vector<Bid> bids = truthful;
      bids[i].amount = g;
      const double u = author_expected_utility(models[i], paper, run_vcg(bids, slots));
      ++report.deviations_checked;
      if (u - honest > worst) {
        worst = u - honest;
        if (worst > report.max_violation) {
          report.worst_bidder = models[i].author_id;
          report.worst_bid = g;
        }
      }
    }
    report.per_bidder_violation.push_back(worst);
    report.max_violation = std::max(report.max_violation, worst);
  }
  return report;
}

}  // namespace hdipp
