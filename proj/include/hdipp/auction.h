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

// Uniform-price auction for identical review slots: the P highest bids win
// and every winner pays the highest losing bid.

#ifndef HDIPP_AUCTION_H_
#define HDIPP_AUCTION_H_

#include <map>
#include <span>
#include <string>
#include <vector>

namespace hdipp {

struct Bid {
  std::string paper_id;
  std::string author_id;
  double amount = 0.0;
};

struct AuthorModel {
  std::string author_id;
  double value_per_acceptance = 0.0;
  // Acceptance probability of each of the author's papers if reviewed.
  std::map<std::string, double> acceptance_prob;

  void validate() const;
};

struct AuctionOutcome {
  // Highest bid first.
  std::vector<std::string> winners;
  double clearing_price = 0.0;
  double revenue = 0.0;
  std::vector<Bid> losing_bids;
};

// Bids ordered by amount descending, then paper_id ascending.
std::vector<Bid> rank_bids(std::span<const Bid> bids);

// Throws UsageError for P <= 0, an empty or malformed bid list, or
// duplicate paper ids.
AuctionOutcome run_vcg(std::span<const Bid> bids, int slots);

// v * eta - price when the paper won, else 0. Throws UsageError when the
// paper did not take part or the model has no acceptance probability for it.
double author_expected_utility(const AuthorModel& model, const std::string& paper_id,
                               const AuctionOutcome& outcome);

struct TruthfulnessReport {
  double max_violation = 0.0;
  std::vector<double> per_bidder_violation;
  std::size_t deviations_checked = 0;
  std::string worst_bidder;
  double worst_bid = 0.0;
};

// Each model holds a single paper. For every bidder, tries every bid on the
// grid {0, each bidder's value, each value +- resolution} against truthful
// opponents and records how much better than bidding v * eta it does.
TruthfulnessReport verify_bid_truthfulness(std::span<const AuthorModel> models, int slots,
                                           double resolution);

}  // namespace hdipp

#endif  // HDIPP_AUCTION_H_
