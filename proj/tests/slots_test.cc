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

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "hdipp/common.h"
#include "hdipp/slots.h"

namespace hdipp {
namespace {

MatchQuality quality(int papers, int reviewers, int capacity, double fill = 1.0) {
  MatchQuality q;
  for (int i = 0; i < papers; ++i) q.papers.push_back("p" + std::to_string(i));
  for (int j = 0; j < reviewers; ++j) q.reviewers.push_back("r" + std::to_string(j));
  q.scores.assign(static_cast<std::size_t>(papers), std::vector<double>(static_cast<std::size_t>(reviewers), fill));
  q.capacity = capacity;
  return q;
}

MatchQuality random_quality(int papers, int reviewers, int capacity, std::uint64_t seed) {
  MatchQuality q = quality(papers, reviewers, capacity);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& row : q.scores) {
    for (auto& s : row) s = u(gen);
  }
  return q;
}

std::vector<int> first_n(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

std::vector<Bid> bids_for(const std::vector<double>& amounts) {
  std::vector<Bid> bids;
  for (std::size_t i = 0; i < amounts.size(); ++i) {
    bids.push_back({"p" + std::to_string(i), "a" + std::to_string(i), amounts[i]});
  }
  return bids;
}

void check_valid(const MatchQuality& q, const Assignment& a) {
  std::map<int, int> load;
  double total = 0.0;
  for (std::size_t i = 0; i < a.papers.size(); ++i) {
    auto r = a.reviewers[i];
    std::sort(r.begin(), r.end());
    CHECK(r[0] != r[1]);
    CHECK(r[1] != r[2]);
    for (int j : r) {
      ++load[j];
      total += q.scores[static_cast<std::size_t>(a.papers[i])][static_cast<std::size_t>(j)];
    }
  }
  for (const auto& [j, n] : load) CHECK(n <= q.capacity);
  CHECK(a.total_score == doctest::Approx(total).epsilon(1e-12));
  CHECK(a.mean_score == doctest::Approx(total / (3.0 * static_cast<double>(a.papers.size()))).epsilon(1e-12));
}

TEST_CASE("diagonal-dominant scores give every paper its top three") {
  MatchQuality q = quality(3, 9, 1, 0.1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 3 * i; j < 3 * i + 3; ++j) {
      q.scores[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.9 - 0.01 * j;
    }
  }
  const Assignment a = default_matcher(q, first_n(3));
  check_valid(q, a);
  for (int i = 0; i < 3; ++i) {
    auto r = a.reviewers[static_cast<std::size_t>(i)];
    std::sort(r.begin(), r.end());
    CHECK(r == std::array<int, 3>{3 * i, 3 * i + 1, 3 * i + 2});
  }
}

TEST_CASE("equal scores are assigned lexicographically") {
  const MatchQuality q = quality(2, 6, 1);
  const Assignment a = default_matcher(q, first_n(2));
  check_valid(q, a);
  auto r0 = a.reviewers[0], r1 = a.reviewers[1];
  std::sort(r0.begin(), r0.end());
  std::sort(r1.begin(), r1.end());
  CHECK(r0 == std::array<int, 3>{0, 1, 2});
  CHECK(r1 == std::array<int, 3>{3, 4, 5});
}

TEST_CASE("no single swap improves the default assignment") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const int papers = 3 + static_cast<int>(seed % 4), reviewers = 9 + static_cast<int>(seed % 3);
    const MatchQuality q = random_quality(papers, reviewers, 2, seed);
    const Assignment a = default_matcher(q, first_n(papers));
    check_valid(q, a);
    auto score = [&](std::size_t i, int j) {
      return q.scores[static_cast<std::size_t>(a.papers[i])][static_cast<std::size_t>(j)];
    };
    auto has = [&](std::size_t i, int j) {
      const auto& r = a.reviewers[i];
      return std::find(r.begin(), r.end(), j) != r.end();
    };
    std::map<int, int> load;
    for (const auto& r : a.reviewers) {
      for (int j : r) ++load[j];
    }
    for (std::size_t i = 0; i < a.papers.size(); ++i) {
      for (int j : a.reviewers[i]) {
        // Replace with an idle reviewer.
        for (int alt = 0; alt < reviewers; ++alt) {
          if (has(i, alt) || load[alt] >= q.capacity) continue;
          CHECK(score(i, alt) <= score(i, j) + 1e-12);
        }
        // Exchange with another paper's reviewer.
        for (std::size_t i2 = 0; i2 < a.papers.size(); ++i2) {
          if (i2 == i) continue;
          for (int j2 : a.reviewers[i2]) {
            if (has(i, j2) || has(i2, j)) continue;
            CHECK(score(i, j2) + score(i2, j) <= score(i, j) + score(i2, j2) + 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("tight capacity is always filled") {
  // Reviewers x capacity equals the slot count exactly.
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int capacity = 1 + static_cast<int>(seed % 3), reviewers = 3 * (2 + static_cast<int>(seed % 4));
    const int papers = reviewers * capacity / 3;
    const MatchQuality q = random_quality(papers, reviewers, capacity, seed * 7);
    const Assignment a = default_matcher(q, first_n(papers));
    REQUIRE(a.reviewers.size() == static_cast<std::size_t>(papers));
    check_valid(q, a);
  }
}

TEST_CASE("matcher rejects insufficient capacity and bad input") {
  CHECK_THROWS_AS(default_matcher(quality(3, 4, 2), first_n(3)), CapacityError);
  MatchQuality bad = quality(2, 3, 1);
  bad.scores[0].pop_back();
  CHECK_THROWS_AS(default_matcher(bad, first_n(1)), UsageError);
  CHECK_THROWS_AS(quality(1, 3, 1).paper_index("missing"), UsageError);
}

SlotPlanInput plan_input(const std::vector<double>& amounts, MatchQuality q, double cost, double lambda) {
  SlotPlanInput in;
  in.bids = bids_for(amounts);
  in.expected_costs.assign(q.papers.size(), std::vector<double>(q.reviewers.size(), cost));
  in.quality = std::move(q);
  in.lambda = lambda;
  return in;
}

TEST_CASE("uniform scores and a loose budget take every slot") {
  const SlotPlan p = plan_slots(plan_input({9, 8, 7, 6, 5}, quality(5, 15, 1), 0.0, 0.5));
  CHECK(p.chosen == 5);
  CHECK(p.feasible.size() == 5);
  CHECK(p.winners.size() == 5);
}

TEST_CASE("an unaffordable budget gives a zero-slot plan") {
  const SlotPlan p = plan_slots(plan_input({9, 8, 7, 6}, quality(4, 12, 1), 100.0, 1.0));
  CHECK(p.chosen == 0);
  CHECK(p.feasible.empty());
  CHECK_FALSE(p.note.empty());
  CHECK(p.winners.empty());
}

TEST_CASE("score threshold filters candidates before the argmax") {
  MatchQuality q = quality(2, 6, 2, 0.2);
  q.scores[0] = {0.9, 0.9, 0.9, 0.1, 0.1, 0.1};
  SlotPlanInput in = plan_input({10, 9}, q, 0.0, 0.01);
  in.min_avg_score = 0.8;
  const SlotPlan p = plan_slots(in);
  CHECK(p.chosen == 1);
  CHECK(p.feasible == std::vector<int>{1});
}

TEST_CASE("plan matches brute-force evaluation of every slot count") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> bid(0.0, 10.0), cost(0.0, 1.2);
    const int N = 8;
    MatchQuality q = random_quality(N, 12, 2, seed + 100);
    SlotPlanInput in;
    std::vector<double> amounts;
    for (int i = 0; i < N; ++i) amounts.push_back(bid(gen));
    in.bids = bids_for(amounts);
    in.expected_costs.assign(static_cast<std::size_t>(N), std::vector<double>(12));
    for (auto& row : in.expected_costs) {
      for (auto& c : row) c = cost(gen);
    }
    in.quality = q;
    in.lambda = 0.05 * static_cast<double>(seed % 3);
    in.min_avg_score = seed % 2 ? 0.5 : -1.0;
    const SlotPlan plan = plan_slots(in);

    // Oracle: rank bids, price at n is the (n+1)-th bid, feasibility and
    // objective from the matcher's assignment of the top n papers.
    std::vector<int> order = first_n(N);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (amounts[static_cast<std::size_t>(a)] != amounts[static_cast<std::size_t>(b)]) {
        return amounts[static_cast<std::size_t>(a)] > amounts[static_cast<std::size_t>(b)];
      }
      return a < b;
    });
    int best_n = 0;
    double best_obj = 0.0;
    std::vector<int> feasible;
    for (int n = 1; n <= N; ++n) {
      const std::vector<int> top(order.begin(), order.begin() + n);
      const Assignment a = default_matcher(q, top);
      double c = 0.0;
      for (std::size_t i = 0; i < a.papers.size(); ++i) {
        for (int j : a.reviewers[i]) {
          c += in.expected_costs[static_cast<std::size_t>(a.papers[i])][static_cast<std::size_t>(j)];
        }
      }
      const double price = n < N ? amounts[static_cast<std::size_t>(order[static_cast<std::size_t>(n)])] : 0.0;
      if (price * n < c || a.mean_score < in.min_avg_score) continue;
      feasible.push_back(n);
      const double obj = a.mean_score + in.lambda * n;
      if (best_n == 0 || obj >= best_obj) {
        best_n = n;
        best_obj = obj;
      }
    }
    CHECK(plan.feasible == feasible);
    CHECK(plan.chosen == best_n);
    if (best_n > 0) {
      CHECK(plan.objective == doctest::Approx(best_obj).epsilon(1e-12));
      // Budget safety at the chosen count.
      const auto& cand = plan.candidates[static_cast<std::size_t>(best_n - 1)];
      CHECK(cand.n == best_n);
      CHECK(cand.revenue >= cand.cost);
      check_valid(q, plan.assignment);
      CHECK(plan.objective == doctest::Approx(plan.assignment.mean_score + in.lambda * best_n).epsilon(1e-12));
    }
    // Deterministic.
    const SlotPlan again = plan_slots(in);
    CHECK(again.chosen == plan.chosen);
    CHECK(again.winners == plan.winners);
  }
}

TEST_CASE("plan input validation") {
  SlotPlanInput in = plan_input({3, 2}, quality(2, 6, 1), 0.0, -1.0);
  CHECK_THROWS_AS(plan_slots(in), UsageError);
  in.lambda = 0.0;
  in.expected_costs[0][0] = -1.0;
  CHECK_THROWS_AS(plan_slots(in), UsageError);
}

}  // namespace
}  // namespace hdipp
