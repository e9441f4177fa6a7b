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

#include "hdipp/slots.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hdipp/common.h"

namespace hdipp {
namespace {

constexpr double kImprovement = 1e-12;

bool holds(const std::array<int, 3>& slots, int reviewer) {
  return std::find(slots.begin(), slots.end(), reviewer) != slots.end();
}

}  // namespace

void MatchQuality::validate() const {
  if (capacity < 1) throw UsageError("reviewer capacity must be at least 1");
  if (reviewers.size() < 3) throw UsageError("matching needs at least three reviewers");
  if (scores.size() != papers.size()) throw UsageError("score matrix needs one row per paper");
  for (const auto& row : scores) {
    if (row.size() != reviewers.size()) {
      throw UsageError("score matrix needs one column per reviewer");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw UsageError("match scores must be finite");
    }
  }
}

int MatchQuality::paper_index(const std::string& id) const {
  const auto it = std::find(papers.begin(), papers.end(), id);
  if (it == papers.end()) throw UsageError("no match scores for paper " + id);
  return static_cast<int>(it - papers.begin());
}

Assignment default_matcher(const MatchQuality& quality, std::span<const int> papers) {
  quality.validate();
  const int reviewers = static_cast<int>(quality.reviewers.size());
  if (static_cast<long long>(reviewers) * quality.capacity <
      3LL * static_cast<long long>(papers.size())) {
    throw CapacityError("not enough reviewer capacity for " + std::to_string(papers.size()) +
                        " papers");
  }
  const auto score = [&](int paper, int reviewer) {
    return quality.scores[static_cast<std::size_t>(paper)][static_cast<std::size_t>(reviewer)];
  };

  // Greedy pass over (slot position, reviewer) pairs, best score first.
  std::vector<std::tuple<double, int, int>> pairs;  // (score, position, reviewer)
  for (std::size_t i = 0; i < papers.size(); ++i) {
    for (int r = 0; r < reviewers; ++r) pairs.emplace_back(score(papers[i], r), static_cast<int>(i), r);
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    const auto& pa = quality.papers[static_cast<std::size_t>(papers[static_cast<std::size_t>(std::get<1>(a))])];
    const auto& pb = quality.papers[static_cast<std::size_t>(papers[static_cast<std::size_t>(std::get<1>(b))])];
    if (pa != pb) return pa < pb;
    return quality.reviewers[static_cast<std::size_t>(std::get<2>(a))] <
           quality.reviewers[static_cast<std::size_t>(std::get<2>(b))];
  });
  std::vector<std::array<int, 3>> slots(papers.size(), {-1, -1, -1});
  std::vector<int> filled(papers.size(), 0);
  std::vector<int> load(static_cast<std::size_t>(reviewers), 0);
  for (const auto& [s, pos, r] : pairs) {
    const auto up = static_cast<std::size_t>(pos);
    const auto ur = static_cast<std::size_t>(r);
    if (filled[up] == 3 || load[ur] >= quality.capacity || holds(slots[up], r)) continue;
    slots[up][static_cast<std::size_t>(filled[up]++)] = r;
    ++load[ur];
  }
  // Greedy can strand a paper when capacity is tight. Uniform capacity with
  // at least three reviewers always admits a full assignment, so fill the
  // gaps along augmenting paths: the short paper takes a reviewer from
  // another paper, which takes one from the next, until some reviewer with
  // spare capacity closes the chain.
  for (std::size_t i = 0; i < papers.size(); ++i) {
    while (filled[i] < 3) {
      // parent[p] = (previous paper, reviewer moved from p to it)
      std::vector<std::pair<int, int>> parent(papers.size(), {-1, -1});
      std::vector<char> seen(papers.size(), 0);
      std::vector<int> queue = {static_cast<int>(i)};
      seen[i] = 1;
      int end_paper = -1, end_reviewer = -1;
      for (std::size_t head = 0; head < queue.size() && end_paper < 0; ++head) {
        const auto p = static_cast<std::size_t>(queue[head]);
        for (int r = 0; r < reviewers && end_paper < 0; ++r) {
          if (holds(slots[p], r)) continue;
          if (load[static_cast<std::size_t>(r)] < quality.capacity) {
            end_paper = static_cast<int>(p);
            end_reviewer = r;
            break;
          }
          for (std::size_t q = 0; q < papers.size(); ++q) {
            if (seen[q] || !holds(slots[q], r)) continue;
            seen[q] = 1;
            parent[q] = {static_cast<int>(p), r};
            queue.push_back(static_cast<int>(q));
          }
        }
      }
      if (end_paper < 0) {
        throw CapacityError("no assignment gives paper " +
                            quality.papers[static_cast<std::size_t>(papers[i])] +
                            " three distinct reviewers");
      }
      // Walk back: end_paper gains end_reviewer; each paper on the chain
      // hands its reviewer to its parent and takes the one passed down.
      auto p = static_cast<std::size_t>(end_paper);
      int incoming = end_reviewer;
      ++load[static_cast<std::size_t>(end_reviewer)];
      while (p != i) {
        const auto [prev, moved] = parent[p];
        auto& row = slots[p];
        *std::find(row.begin(), row.end(), moved) = incoming;
        incoming = moved;
        p = static_cast<std::size_t>(prev);
      }
      slots[i][static_cast<std::size_t>(filled[i]++)] = incoming;
    }
  }

  // Local improvement: exchange two assigned reviewers across papers, or
  // hand a slot to a reviewer with spare capacity, while the total rises.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < papers.size() && !improved; ++i) {
      for (std::size_t a = 0; a < 3 && !improved; ++a) {
        const int r1 = slots[i][a];
        for (int r = 0; r < reviewers && !improved; ++r) {
          if (load[static_cast<std::size_t>(r)] >= quality.capacity || holds(slots[i], r)) continue;
          if (score(papers[i], r) > score(papers[i], r1) + kImprovement) {
            slots[i][a] = r;
            --load[static_cast<std::size_t>(r1)];
            ++load[static_cast<std::size_t>(r)];
            improved = true;
          }
        }
        for (std::size_t j = i + 1; j < papers.size() && !improved; ++j) {
          for (std::size_t b = 0; b < 3 && !improved; ++b) {
            const int r2 = slots[j][b];
            if (r1 == r2 || holds(slots[j], r1) || holds(slots[i], r2)) continue;
            const double delta = score(papers[i], r2) + score(papers[j], r1) -
                                 score(papers[i], r1) - score(papers[j], r2);
            if (delta > kImprovement) {
              slots[i][a] = r2;
              slots[j][b] = r1;
              improved = true;
            }
          }
        }
      }
    }
  }

  Assignment out;
  out.papers.assign(papers.begin(), papers.end());
  out.reviewers = slots;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    for (int r : slots[i]) out.total_score += score(papers[i], r);
  }
  out.mean_score = papers.empty() ? 0.0 : out.total_score / (3.0 * static_cast<double>(papers.size()));
  return out;
}

SlotPlan plan_slots(const SlotPlanInput& input) {
  input.quality.validate();
  if (!std::isfinite(input.lambda) || input.lambda < 0.0) {
    throw UsageError("lambda must be finite and nonnegative");
  }
  if (input.expected_costs.size() != input.quality.papers.size()) {
    throw UsageError("expected costs need one row per paper");
  }
  for (const auto& row : input.expected_costs) {
    if (row.size() != input.quality.reviewers.size()) {
      throw UsageError("expected costs need one column per reviewer");
    }
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) throw UsageError("expected costs must be nonnegative");
    }
  }
  const std::vector<Bid> ranked = rank_bids(input.bids);
  std::vector<int> order;
  for (const auto& b : ranked) order.push_back(input.quality.paper_index(b.paper_id));
  const Matcher matcher = input.matcher ? input.matcher : [&](std::span<const int> papers) {
    return default_matcher(input.quality, papers);
  };

  SlotPlan plan;
  const int N = static_cast<int>(ranked.size());
  std::vector<Assignment> assignments(static_cast<std::size_t>(N) + 1);
  for (int n = 1; n <= N; ++n) {
    SlotCandidate c;
    c.n = n;
    const double price = n < N ? ranked[static_cast<std::size_t>(n)].amount : 0.0;
    c.revenue = price * n;
    try {
      assignments[static_cast<std::size_t>(n)] =
          matcher(std::span<const int>(order.data(), static_cast<std::size_t>(n)));
      c.matched = true;
    } catch (const CapacityError& e) {
      c.note = e.what();
    }
    if (c.matched) {
      const Assignment& a = assignments[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < a.papers.size(); ++i) {
        for (int r : a.reviewers[i]) {
          c.cost += input.expected_costs[static_cast<std::size_t>(a.papers[i])][static_cast<std::size_t>(r)];
        }
      }
      c.budget_ok = c.revenue >= c.cost;
      c.mean_score = a.mean_score;
      c.score_ok = c.mean_score >= input.min_avg_score;
      c.objective = c.mean_score + input.lambda * n;
      if (c.budget_ok && c.score_ok) plan.feasible.push_back(n);
    }
    plan.candidates.push_back(c);
  }

  for (int n : plan.feasible) {
    const auto& c = plan.candidates[static_cast<std::size_t>(n - 1)];
    if (plan.chosen == 0 || c.objective >= plan.objective) {
      plan.chosen = n;
      plan.objective = c.objective;
    }
  }
  if (plan.chosen == 0) {
    plan.note = "no slot count satisfies both the budget and the score threshold";
    return plan;
  }
  plan.assignment = assignments[static_cast<std::size_t>(plan.chosen)];
  for (int i = 0; i < plan.chosen; ++i) plan.winners.push_back(ranked[static_cast<std::size_t>(i)].paper_id);
  return plan;
}

}  // namespace hdipp
