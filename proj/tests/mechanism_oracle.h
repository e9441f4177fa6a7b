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

// A deliberately naive re-implementation of the review game for
// deterministic strategies: every probability is a brute-force sum over the
// prior's cells and every forecast is a ratio of such sums. Slow, but it
// shares no code with the library beyond the prior container.

#ifndef HDIPP_TESTS_MECHANISM_ORACLE_H_
#define HDIPP_TESTS_MECHANISM_ORACLE_H_

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "hdipp/probability.h"
#include "test_util.h"

namespace hdipp::testing {

struct OracleProfile {
  std::array<int, 3> effort{};
  // maps[k][t][completed value] = reported value
  std::array<std::vector<std::vector<int>>, 3> maps;

  static OracleProfile truthful(const CriteriaHierarchy& h) {
    OracleProfile p;
    for (int k = 0; k < 3; ++k) {
      p.effort[static_cast<std::size_t>(k)] = h.criteria();
      for (int d : h.alphabet_sizes) {
        std::vector<int> id(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) id[static_cast<std::size_t>(i)] = i;
        p.maps[static_cast<std::size_t>(k)].push_back(id);
      }
    }
    return p;
  }
};

// argmax_v P(X_r^target = v | X_r^{<|observed|} = observed), lowest v on ties.
inline int oracle_guess(const JointPrior& prior, int r, const std::vector<int>& observed, int target) {
  const int T = prior.criteria();
  std::vector<int> axes;
  for (std::size_t t = 0; t < observed.size(); ++t) axes.push_back(r * T + static_cast<int>(t));
  axes.push_back(r * T + target);
  const auto m = oracle_marginal(prior.table(), axes);
  int best = 0;
  double best_p = -1.0;
  for (int v = 0; v < prior.hierarchy().alphabet(target); ++v) {
    std::vector<int> key = observed;
    key.push_back(v);
    const double p = m.at(key);
    if (p > best_p) {
      best_p = p;
      best = v;
    }
  }
  return best;
}

struct OracleCell {
  double p = 0.0;
  std::array<std::vector<int>, 3> truth;
  std::array<std::vector<int>, 3> report;
};

inline std::vector<OracleCell> oracle_cells(const JointPrior& prior, const OracleProfile& s) {
  const int T = prior.criteria();
  std::vector<OracleCell> cells;
  std::map<std::pair<int, std::vector<int>>, std::vector<int>> guesses;
  for_each_cell(prior.table(), [&](const std::vector<int>& x, double p) {
    OracleCell c;
    c.p = p;
    for (int r = 0; r < 3; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      c.truth[ur].assign(x.begin() + r * T, x.begin() + (r + 1) * T);
      const int e = s.effort[ur];
      std::vector<int> observed(c.truth[ur].begin(), c.truth[ur].begin() + e);
      auto& g = guesses[{r, observed}];
      if (g.empty()) {
        for (int t = e; t < T; ++t) g.push_back(oracle_guess(prior, r, observed, t));
      }
      for (int t = 0; t < T; ++t) {
        const int completed = t < e ? c.truth[ur][static_cast<std::size_t>(t)] : g[static_cast<std::size_t>(t - e)];
        c.report[ur].push_back(s.maps[ur][static_cast<std::size_t>(t)][static_cast<std::size_t>(completed)]);
      }
    }
    cells.push_back(std::move(c));
  });
  return cells;
}

// Honest forecast of the target's report on criterion t from the expert's
// effort-informed signals and the source's first `visible` reports.
struct OracleForecasts {
  // key: (expert true prefix, source report prefix) -> weights over the target value
  std::map<std::vector<int>, std::vector<double>> table;

  double prob(const std::vector<int>& key, int value) const {
    const auto& w = table.at(key);
    double total = 0.0;
    for (double v : w) total += v;
    return w[static_cast<std::size_t>(value)] / total;
  }
};

inline std::vector<int> oracle_key(const OracleCell& c, int e, int effort, int src, int visible) {
  std::vector<int> key(c.truth[static_cast<std::size_t>(e)].begin(),
                       c.truth[static_cast<std::size_t>(e)].begin() + effort);
  key.push_back(-1);  // separator
  key.insert(key.end(), c.report[static_cast<std::size_t>(src)].begin(),
             c.report[static_cast<std::size_t>(src)].begin() + visible);
  return key;
}

inline OracleForecasts oracle_forecasts(const JointPrior& prior, const std::vector<OracleCell>& cells,
                                        const OracleProfile& s, int e, int t, int visible) {
  const int tgt = (e + 1) % 3, src = (e + 2) % 3;
  OracleForecasts f;
  const int d = prior.hierarchy().alphabet(t);
  for (const auto& c : cells) {
    auto& w = f.table[oracle_key(c, e, s.effort[static_cast<std::size_t>(e)], src, visible)];
    if (w.empty()) w.assign(static_cast<std::size_t>(d), 0.0);
    w[static_cast<std::size_t>(c.report[static_cast<std::size_t>(tgt)][static_cast<std::size_t>(t)])] += c.p;
  }
  return f;
}

struct OraclePayment {
  // [k][t]
  std::array<std::vector<double>, 3> expert;
  std::array<std::vector<double>, 3> target;
};

// Expected unweighted expert and target components for every reviewer and
// criterion, with every expert forecasting honestly.
inline OraclePayment oracle_expected_components(const JointPrior& prior, const OracleProfile& s) {
  const int T = prior.criteria();
  const auto cells = oracle_cells(prior, s);
  OraclePayment out;
  for (auto& v : out.expert) v.assign(static_cast<std::size_t>(T), 0.0);
  for (auto& v : out.target) v.assign(static_cast<std::size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    std::array<OracleForecasts, 3> first, second;
    for (int e = 0; e < 3; ++e) {
      first[static_cast<std::size_t>(e)] = oracle_forecasts(prior, cells, s, e, t, t);
      second[static_cast<std::size_t>(e)] = oracle_forecasts(prior, cells, s, e, t, t + 1);
    }
    for (const auto& c : cells) {
      for (int k = 0; k < 3; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const int p = (k + 1) % 3, q = (k + 2) % 3;
        // k as expert on p, with source q.
        const int xp = c.report[static_cast<std::size_t>(p)][static_cast<std::size_t>(t)];
        const double s1 = std::log(first[uk].prob(oracle_key(c, k, s.effort[uk], q, t), xp));
        const double s2 = std::log(second[uk].prob(oracle_key(c, k, s.effort[uk], q, t + 1), xp));
        out.expert[uk][static_cast<std::size_t>(t)] += c.p * (s1 + s2);
        // k as target of q, whose source is p.
        const auto uq = static_cast<std::size_t>(q);
        const int xk = c.report[uk][static_cast<std::size_t>(t)];
        const double f1 = first[uq].prob(oracle_key(c, q, s.effort[uq], p, t), xk);
        const double f2 = second[uq].prob(oracle_key(c, q, s.effort[uq], p, t + 1), xk);
        out.target[uk][static_cast<std::size_t>(t)] += c.p * (std::log(f2) - std::log(f1));
      }
    }
  }
  return out;
}

}  // namespace hdipp::testing

#endif  // HDIPP_TESTS_MECHANISM_ORACLE_H_
