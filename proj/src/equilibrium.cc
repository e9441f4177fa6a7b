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

#include "hdipp/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace hdipp {
namespace {

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t prefix_cells(const CriteriaHierarchy& h, int count) {
  std::size_t n = 1;
  for (int t = 0; t < count; ++t) n *= static_cast<std::size_t>(h.alphabet(t));
  return n;
}

std::size_t prefix_index(const CriteriaHierarchy& h, std::span<const int> x, int count) {
  std::size_t n = 0;
  for (int t = 0; t < count; ++t) {
    n = n * static_cast<std::size_t>(h.alphabet(t)) + static_cast<std::size_t>(x[static_cast<std::size_t>(t)]);
  }
  return n;
}

struct Cell {
  std::array<std::size_t, 3> own;
  std::array<std::vector<int>, 3> x;
};

// Tabulates prior mass against features of each prior cell; `fill` writes
// one value per output axis.
template <typename Fill>
Table feature_table(const JointPrior& prior, std::vector<int> shape, Fill&& fill) {
  const CriteriaHierarchy& h = prior.hierarchy();
  Table out = Table::zeros(shape);
  Cell cell;
  for (auto& s : cell.x) s.resize(static_cast<std::size_t>(h.criteria()));
  std::vector<int> assignment(shape.size());
  const Table& joint = prior.table();
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    if (joint[flat] <= 0.0) continue;
    cell.own = split_cell(prior, flat);
    for (std::size_t r = 0; r < 3; ++r) decode_own(h, cell.own[r], cell.x[r]);
    fill(cell, std::span<int>(assignment));
    out[out.flat_index(assignment)] += joint[flat];
  }
  return out;
}

struct ReportSupport {
  std::vector<std::pair<int, double>> entries;
};

ExpectedPaymentReport enumerate_payments(const InducedJoint& joint,
                                         const Hyperparameters& hp,
                                         const ForecastBook& books,
                                         std::size_t max_realizations) {
  const CriteriaHierarchy& h = joint.prior().hierarchy();
  const int T = h.criteria();
  hp.validate(T);
  const auto& profile = joint.profile();

  // Upper bound on realizations before doing any work.
  std::size_t positive = 0;
  for (double v : joint.prior().table().data()) positive += v > 0.0 ? 1 : 0;
  double bound = static_cast<double>(positive);
  for (Reviewer k : kAllReviewers) {
    for (int t = 0; t < T; ++t) {
      std::size_t widest = 1;
      for (const auto& row : profile[k].reporting.per_criterion[static_cast<std::size_t>(t)].rows()) {
        widest = std::max<std::size_t>(
            widest, static_cast<std::size_t>(std::count_if(row.begin(), row.end(),
                                                           [](double v) { return v > 0.0; })));
      }
      bound *= static_cast<double>(widest);
    }
  }
  if (bound > static_cast<double>(max_realizations)) {
    throw CapacityError("expected payment enumeration needs up to " +
                        std::to_string(static_cast<long long>(bound)) +
                        " realizations, budget is " + std::to_string(max_realizations));
  }

  ExpectedPaymentReport report;
  for (Reviewer k : kAllReviewers) {
    auto& r = report.reviewers[static_cast<std::size_t>(index_of(k))];
    r.reviewer = k;
    r.expert.assign(static_cast<std::size_t>(T), 0.0);
    r.target.assign(static_cast<std::size_t>(T), 0.0);
  }

  const Table& prior = joint.prior().table();
  std::array<std::vector<int>, 3> signals;
  std::array<std::vector<int>, 3> reports;
  for (std::size_t r = 0; r < 3; ++r) {
    signals[r].resize(static_cast<std::size_t>(T));
    reports[r].resize(static_cast<std::size_t>(T));
  }
  const std::size_t slots = 3 * static_cast<std::size_t>(T);
  std::vector<ReportSupport> support(slots);
  std::vector<std::size_t> odometer(slots);

  for (std::size_t flat = 0; flat < prior.size(); ++flat) {
    const double p = prior[flat];
    if (p <= 0.0) continue;
    const auto own = split_cell(joint.prior(), flat);
    for (Reviewer k : kAllReviewers) {
      const auto ki = static_cast<std::size_t>(index_of(k));
      decode_own(h, own[ki], signals[ki]);
      const auto completed = joint.completed(k, own[ki]);
      for (int t = 0; t < T; ++t) {
        const auto& row = profile[k].reporting.per_criterion[static_cast<std::size_t>(t)]
                              .row(completed[static_cast<std::size_t>(t)]);
        auto& s = support[ki * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)];
        s.entries.clear();
        for (std::size_t v = 0; v < row.size(); ++v) {
          if (row[v] > 0.0) s.entries.emplace_back(static_cast<int>(v), row[v]);
        }
      }
    }
    std::fill(odometer.begin(), odometer.end(), 0);
    while (true) {
      double w = p;
      for (std::size_t s = 0; s < slots; ++s) {
        const auto& [value, prob] = support[s].entries[odometer[s]];
        w *= prob;
        reports[s / static_cast<std::size_t>(T)][s % static_cast<std::size_t>(T)] = value;
      }
      if (w > 0.0) {
        const Transcript tr = play_round(books, signals, reports);
        ++report.realizations;
        for (Reviewer k : kAllReviewers) {
          auto& acc = report.reviewers[static_cast<std::size_t>(index_of(k))];
          double realized = 0.0;
          for (int t = 0; t < T; ++t) {
            const double e = expert_component(tr, k, t);
            const double g = target_component(tr, k, t);
            acc.expert[static_cast<std::size_t>(t)] += w * e;
            acc.target[static_cast<std::size_t>(t)] += w * g;
            realized += hp.a(k, t) * e + hp.b(k, t) * g;
          }
          acc.max_abs_realized = std::max(acc.max_abs_realized, std::abs(realized));
        }
      }
      int s = static_cast<int>(slots) - 1;
      for (; s >= 0; --s) {
        const auto us = static_cast<std::size_t>(s);
        if (++odometer[us] < support[us].entries.size()) break;
        odometer[us] = 0;
      }
      if (s < 0) break;
    }
  }

  for (Reviewer k : kAllReviewers) {
    auto& r = report.reviewers[static_cast<std::size_t>(index_of(k))];
    for (int t = 0; t < T; ++t) {
      r.total += hp.a(k, t) * r.expert[static_cast<std::size_t>(t)] +
                 hp.b(k, t) * r.target[static_cast<std::size_t>(t)];
    }
    report.aggregate += r.total;
  }
  return report;
}

// Negative conditional entropies and conditional mutual informations that
// the enumerated components equal when forecasts are Bayes posteriors.
void fill_closed_forms(const InducedJoint& joint, const Hyperparameters& hp,
                       ExpectedPaymentReport& report) {
  const int T = joint.criteria();
  const auto& profile = joint.profile();
  for (Reviewer k : kAllReviewers) {
    auto& r = report.reviewers[static_cast<std::size_t>(index_of(k))];
    r.expert_closed.assign(static_cast<std::size_t>(T), 0.0);
    r.target_closed.assign(static_cast<std::size_t>(T), 0.0);
    const Reviewer p = target_of(k);
    const Reviewer q = source_of(k);
    const int tk = profile[k].effort;
    const Reviewer e = expert_of(k);  // forecasts k, helped by k's target
    const int te = profile[e].effort;
    for (int t = 0; t < T; ++t) {
      // Expert side: [X^_p^t, X_k^{<tk}, X^_q^{<=t}].
      std::vector<Variable> vars = {{p, t, VarKind::kReported}};
      for (int s = 0; s < tk; ++s) vars.push_back({k, s, VarKind::kTrue});
      for (int s = 0; s <= t; ++s) vars.push_back({q, s, VarKind::kReported});
      const Table m = joint.marginal(vars);
      std::vector<int> z_first, z_second;
      for (int a = 1; a <= tk; ++a) {
        z_first.push_back(a);
        z_second.push_back(a);
      }
      for (int s = 0; s <= t; ++s) {
        if (s < t) z_first.push_back(1 + tk + s);
        z_second.push_back(1 + tk + s);
      }
      const std::vector<int> x = {0};
      r.expert_closed[static_cast<std::size_t>(t)] =
          -conditional_entropy(m, x, z_first) - conditional_entropy(m, x, z_second);

      // Target side: I(X^_k^t ; X^_p^t | X_e^{<te}, X^_p^{<t}).
      std::vector<Variable> tv = {{k, t, VarKind::kReported}, {p, t, VarKind::kReported}};
      for (int s = 0; s < te; ++s) tv.push_back({e, s, VarKind::kTrue});
      for (int s = 0; s < t; ++s) tv.push_back({p, s, VarKind::kReported});
      const Table mt = joint.marginal(tv);
      std::vector<int> z;
      for (int a = 2; a < static_cast<int>(tv.size()); ++a) z.push_back(a);
      const std::vector<int> xa = {0}, ya = {1};
      r.target_closed[static_cast<std::size_t>(t)] =
          conditional_mutual_information(mt, xa, ya, z);
    }
    r.total_closed = 0.0;
    for (int t = 0; t < T; ++t) {
      r.total_closed += hp.a(k, t) * r.expert_closed[static_cast<std::size_t>(t)] +
                        hp.b(k, t) * r.target_closed[static_cast<std::size_t>(t)];
      report.max_discrepancy = std::max(
          {report.max_discrepancy,
           std::abs(r.expert[static_cast<std::size_t>(t)] - r.expert_closed[static_cast<std::size_t>(t)]),
           std::abs(r.target[static_cast<std::size_t>(t)] - r.target_closed[static_cast<std::size_t>(t)])});
    }
  }
  report.closed_form_valid = true;
}

std::vector<int> decode_map(std::size_t index, int d) {
  std::vector<int> map(static_cast<std::size_t>(d));
  for (int c = d - 1; c >= 0; --c) {
    map[static_cast<std::size_t>(c)] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return map;
}

std::size_t encode_map(std::span<const int> map) {
  std::size_t index = 0;
  for (int v : map) index = index * map.size() + static_cast<std::size_t>(v);
  return index;
}

// Expected expert score (unweighted) of k forecasting honestly with effort
// `effort` against the designated peers.
std::vector<double> honest_expert_scores(const InducedJoint& joint, Reviewer k) {
  const int T = joint.criteria();
  const int tk = joint.profile()[k].effort;
  const Reviewer p = target_of(k), q = source_of(k);
  std::vector<double> out(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    std::vector<Variable> vars = {{p, t, VarKind::kReported}};
    for (int s = 0; s < tk; ++s) vars.push_back({k, s, VarKind::kTrue});
    for (int s = 0; s <= t; ++s) vars.push_back({q, s, VarKind::kReported});
    const Table m = joint.marginal(vars);
    std::vector<int> z1, z2;
    for (int a = 1; a <= tk; ++a) {
      z1.push_back(a);
      z2.push_back(a);
    }
    for (int s = 0; s <= t; ++s) {
      if (s < t) z1.push_back(1 + tk + s);
      z2.push_back(1 + tk + s);
    }
    const std::vector<int> x = {0};
    out[static_cast<std::size_t>(t)] = -conditional_entropy(m, x, z1) - conditional_entropy(m, x, z2);
  }
  return out;
}

// V[c][r]: expected target-score contribution of reporting r on criterion t
// in the event that k's completed signal is c, scored by the peer expert's
// fixed forecasts.
std::vector<std::vector<double>> target_values(const InducedJoint& joint, Reviewer k,
                                               int t, const ForecastBook& peer_books) {
  const CriteriaHierarchy& h = joint.prior().hierarchy();
  const Reviewer e = expert_of(k);
  const Reviewer p = source_of(e);
  const int te = peer_books.expert_effort(e);
  const int d = h.alphabet(t);
  std::vector<Variable> vars = {{k, t, VarKind::kCompleted}};
  for (int s = 0; s < te; ++s) vars.push_back({e, s, VarKind::kTrue});
  for (int s = 0; s <= t; ++s) vars.push_back({p, s, VarKind::kReported});
  const Table m = joint.marginal(vars);

  std::vector<std::vector<double>> v(static_cast<std::size_t>(d),
                                     std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<int> a(vars.size());
  std::vector<int> esig(static_cast<std::size_t>(te)), prep(static_cast<std::size_t>(t + 1));
  for (std::size_t flat = 0; flat < m.size(); ++flat) {
    const double w = m[flat];
    if (w <= 0.0) continue;
    m.unravel(flat, a);
    for (int s = 0; s < te; ++s) esig[static_cast<std::size_t>(s)] = a[static_cast<std::size_t>(1 + s)];
    for (int s = 0; s <= t; ++s) prep[static_cast<std::size_t>(s)] = a[static_cast<std::size_t>(1 + te + s)];
    const Distribution& first = peer_books.lookup(e, t, ForecastStage::kFirst, esig, prep);
    const Distribution& second = peer_books.lookup(e, t, ForecastStage::kSecond, esig, prep);
    auto& row = v[static_cast<std::size_t>(a[0])];
    for (int r = 0; r < d; ++r) {
      row[static_cast<std::size_t>(r)] += w * (log_score(r, second) - log_score(r, first));
    }
  }
  return v;
}

ForecastBook designated_peer_books(const InducedJoint& designated) {
  ForecastBook books = ForecastBook::honest(designated);
  books.apply_floor(kForecastFloor);
  return books;
}

// Perturbs k's own honest forecasts on their most likely key and measures
// the change in expected expert score. Returns (max gain, checks run).
std::pair<double, std::size_t> spot_check_predictions(const InducedJoint& joint, Reviewer k) {
  const CriteriaHierarchy& h = joint.prior().hierarchy();
  const int T = h.criteria();
  const int tk = joint.profile()[k].effort;
  const Reviewer p = target_of(k), q = source_of(k);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t checks = 0;
  for (int t = 0; t < T; ++t) {
    for (int visible : {t, t + 1}) {
      std::vector<Variable> vars = {{p, t, VarKind::kReported}};
      for (int s = 0; s < tk; ++s) vars.push_back({k, s, VarKind::kTrue});
      for (int s = 0; s < visible; ++s) vars.push_back({q, s, VarKind::kReported});
      const Table m = joint.marginal(vars);
      const int d = h.alphabet(t);
      const std::size_t keys = m.size() / static_cast<std::size_t>(d);
      const std::size_t stride = m.stride(0);
      std::size_t best_key = 0;
      double best_mass = -1.0;
      for (std::size_t key = 0; key < keys; ++key) {
        double mass = 0.0;
        for (int v = 0; v < d; ++v) mass += m[static_cast<std::size_t>(v) * stride + key];
        if (mass > best_mass) {
          best_mass = mass;
          best_key = key;
        }
      }
      std::vector<double> w(static_cast<std::size_t>(d));
      for (int v = 0; v < d; ++v) w[static_cast<std::size_t>(v)] = m[static_cast<std::size_t>(v) * stride + best_key];
      const Distribution honest = Distribution::from_weights(w);
      for (double delta : {0.1, -0.1}) {
        std::vector<double> f(honest.probabilities().begin(), honest.probabilities().end());
        f[0] = std::max(f[0] + delta, kForecastFloor);
        f[1] = std::max(f[1] - delta, kForecastFloor);
        const Distribution perturbed =
            apply_forecast_floor(Distribution::from_weights(f), kForecastFloor);
        double gain = 0.0;
        for (int v = 0; v < d; ++v) {
          const double mass = w[static_cast<std::size_t>(v)];
          if (mass > 0.0) gain += mass * (log_score(v, perturbed) - log_score(v, honest));
        }
        worst = std::max(worst, gain);
        ++checks;
      }
    }
  }
  return {worst, checks};
}

}  // namespace

ExpectedPaymentReport expected_payment_exact(const InducedJoint& joint,
                                             const Hyperparameters& hp,
                                             std::size_t max_realizations) {
  ExpectedPaymentReport report =
      enumerate_payments(joint, hp, ForecastBook::honest(joint), max_realizations);
  fill_closed_forms(joint, hp, report);
  return report;
}

ExpectedPaymentReport expected_payment_exact(const InducedJoint& joint,
                                             const Hyperparameters& hp,
                                             const ForecastBook& books,
                                             std::size_t max_realizations) {
  return enumerate_payments(joint, hp, books, max_realizations);
}

double expected_utility(const ExpectedPaymentReport& report, Reviewer k,
                        const EffortCost& cost, int effort) {
  return report[k].total - cost.total(effort);
}

double expected_utility(const InducedJoint& joint, const Hyperparameters& hp,
                        Reviewer k, const EffortCost& cost) {
  return expected_utility(expected_payment_exact(joint, hp), k, cost,
                          joint.profile()[k].effort);
}

MarginalReport marginal_payments(std::shared_ptr<const JointPrior> prior,
                                 const Hyperparameters& hp, Reviewer k, int effort,
                                 const EffortCost* cost) {
  const CriteriaHierarchy& h = prior->hierarchy();
  const int T = h.criteria();
  if (effort < 1 || effort > T) throw UsageError("marginal_payments: effort must lie in 1..T");
  hp.validate(T);
  const Reviewer p = target_of(k);
  const Reviewer q = source_of(k);  // also the reviewer who forecasts k
  const int j = effort - 1;         // criterion being completed

  StrategyProfile hi_profile = StrategyProfile::truthful_full_effort(h);
  hi_profile[k].effort = effort;
  StrategyProfile lo_profile = hi_profile;
  lo_profile[k].effort = effort - 1;
  const InducedJoint hi(prior, hi_profile);
  const InducedJoint lo(prior, lo_profile);
  const ExpectedPaymentReport r_hi = expected_payment_exact(hi, hp);
  const ExpectedPaymentReport r_lo = expected_payment_exact(lo, hp);

  MarginalReport out;
  out.reviewer = k;
  out.effort = effort;
  out.criteria.resize(static_cast<std::size_t>(T));
  const Table& joint = prior->table();
  const std::size_t own_cells = h.own_cells();
  const auto ki = static_cast<std::size_t>(index_of(k));
  const auto qi = static_cast<std::size_t>(index_of(q));
  const auto pi = static_cast<std::size_t>(index_of(p));

  for (int t = 0; t < T; ++t) {
    auto& c = out.criteria[static_cast<std::size_t>(t)];
    // Expert side: what X_k^j adds about X_p^t beyond k's lower criteria,
    // with the source's scores through t and through t-1.
    const std::vector<int> x = {prior->axis(p, t)};
    const std::vector<int> y = {prior->axis(k, j)};
    const std::vector<int> lower = prior->axes(k, 0, j);
    c.expert_formula =
        conditional_mutual_information(joint, x, y, concat(lower, prior->axes(q, 0, t + 1))) +
        conditional_mutual_information(joint, x, y, concat(lower, prior->axes(q, 0, t)));

    const int d = h.alphabet(t);
    const auto p_prefix = static_cast<int>(prefix_cells(h, t));
    if (t < j) {
      c.target_formula = 0.0;
    } else if (t == j) {
      // Axes: [guess at effort j, q's signals, p's prefix, X_p^t, X_k^t].
      const Table m = feature_table(
          *prior, {d, static_cast<int>(own_cells), p_prefix, d, d},
          [&](const Cell& cell, std::span<int> a) {
            a[0] = lo.completed(k, cell.own[ki])[static_cast<std::size_t>(t)];
            a[1] = static_cast<int>(cell.own[qi]);
            a[2] = static_cast<int>(prefix_index(h, cell.x[pi], t));
            a[3] = cell.x[pi][static_cast<std::size_t>(t)];
            a[4] = cell.x[ki][static_cast<std::size_t>(t)];
          });
      const std::vector<int> xb = {3}, yk = {4}, yg = {0}, z = {1, 2};
      c.target_formula = conditional_mutual_information(m, xb, yk, z) -
                         conditional_mutual_information(m, xb, yg, z);
    } else {
      // Axes: [k's prefix through j, guess at effort j+1, guess at effort
      // j, q's signals, p's prefix, X_p^t].
      const auto k_prefix = static_cast<int>(prefix_cells(h, effort));
      std::vector<int> g1_of(static_cast<std::size_t>(k_prefix), 0);
      std::vector<int> g0_of(static_cast<std::size_t>(k_prefix), 0);
      const Table m = feature_table(
          *prior, {k_prefix, d, d, static_cast<int>(own_cells), p_prefix, d},
          [&](const Cell& cell, std::span<int> a) {
            const auto kp = prefix_index(h, cell.x[ki], effort);
            a[0] = static_cast<int>(kp);
            a[1] = hi.completed(k, cell.own[ki])[static_cast<std::size_t>(t)];
            a[2] = lo.completed(k, cell.own[ki])[static_cast<std::size_t>(t)];
            g1_of[kp] = a[1];
            g0_of[kp] = a[2];
            a[3] = static_cast<int>(cell.own[qi]);
            a[4] = static_cast<int>(prefix_index(h, cell.x[pi], t));
            a[5] = cell.x[pi][static_cast<std::size_t>(t)];
          });
      const std::vector<int> keep1 = {1, 3, 4, 5}, keep0 = {2, 3, 4, 5}, outer_keep = {0, 3, 4};
      const Table p1 = marginal(m, keep1);
      const Table p0 = marginal(m, keep0);
      const Table outer = marginal(m, outer_keep);
      double kl = 0.0;
      std::vector<double> w1(static_cast<std::size_t>(d)), w0(static_cast<std::size_t>(d));
      for (int a = 0; a < k_prefix; ++a) {
        for (std::size_t qo = 0; qo < own_cells; ++qo) {
          for (int pb = 0; pb < p_prefix; ++pb) {
            const std::array<int, 3> oa = {a, static_cast<int>(qo), pb};
            const double w = outer[outer.flat_index(oa)];
            if (w <= 0.0) continue;
            for (int v = 0; v < d; ++v) {
              const std::array<int, 4> i1 = {g1_of[static_cast<std::size_t>(a)], static_cast<int>(qo), pb, v};
              const std::array<int, 4> i0 = {g0_of[static_cast<std::size_t>(a)], static_cast<int>(qo), pb, v};
              w1[static_cast<std::size_t>(v)] = p1[p1.flat_index(i1)];
              w0[static_cast<std::size_t>(v)] = p0[p0.flat_index(i0)];
            }
            kl += w * kl_divergence(Distribution::from_weights(w1),
                                    Distribution::from_weights(w0));
          }
        }
      }
      c.target_formula = kl;
    }

    c.expert_difference = r_hi[k].expert[static_cast<std::size_t>(t)] - r_lo[k].expert[static_cast<std::size_t>(t)];
    c.target_difference = r_hi[k].target[static_cast<std::size_t>(t)] - r_lo[k].target[static_cast<std::size_t>(t)];
    out.weighted_formula += hp.a(k, t) * c.expert_formula + hp.b(k, t) * c.target_formula;
    out.weighted_difference += hp.a(k, t) * c.expert_difference + hp.b(k, t) * c.target_difference;
    out.max_discrepancy = std::max({out.max_discrepancy,
                                    std::abs(c.expert_formula - c.expert_difference),
                                    std::abs(c.target_formula - c.target_difference)});
  }
  if (cost != nullptr) out.marginal_cost = cost->marginal(effort);
  out.relevance_warning = !check_assumptions(*prior).stochastic_relevance;
  return out;
}

ReviewerStrategy Deviation::to_strategy(const CriteriaHierarchy& h) const {
  if (maps.size() != static_cast<std::size_t>(h.criteria())) {
    throw UsageError("deviation needs one reporting map per criterion");
  }
  ReviewerStrategy s;
  s.effort = effort;
  for (const auto& m : maps) s.reporting.per_criterion.push_back(ReportingMap::deterministic(m));
  return s;
}

std::string Deviation::describe() const {
  std::ostringstream os;
  os << "effort " << effort << ", maps [";
  for (std::size_t t = 0; t < maps.size(); ++t) {
    if (t) os << "; ";
    for (std::size_t c = 0; c < maps[t].size(); ++c) {
      if (c) os << ' ';
      os << c << "->" << maps[t][c];
    }
  }
  os << ']';
  return os.str();
}

BestResponseResult best_response_search(std::shared_ptr<const JointPrior> prior,
                                        const Hyperparameters& hp, Reviewer k,
                                        const StrategyProfile& designated,
                                        const EffortCost& cost,
                                        const BestResponseOptions& options) {
  const CriteriaHierarchy& h = prior->hierarchy();
  const int T = h.criteria();
  designated.validate(h);
  hp.validate(T);
  if (cost.max_level() != T) throw UsageError("effort cost must cover levels 0..T");

  std::vector<std::size_t> maps_per_criterion;
  double total = static_cast<double>(T + 1);
  for (int t = 0; t < T; ++t) {
    std::size_t n = 1;
    for (int c = 0; c < h.alphabet(t); ++c) n *= static_cast<std::size_t>(h.alphabet(t));
    maps_per_criterion.push_back(n);
    total *= static_cast<double>(n);
  }
  if (total > static_cast<double>(options.max_deviations)) {
    throw CapacityError("deviation class has " + std::to_string(static_cast<long long>(total)) +
                        " strategies, budget is " + std::to_string(options.max_deviations));
  }

  const InducedJoint des_joint(prior, designated);
  const ForecastBook peer_books = designated_peer_books(des_joint);
  const ReviewerStrategy& own = designated[k];

  // Designated strategy as a deviation index, when it is pure.
  bool designated_pure = true;
  std::vector<std::size_t> designated_maps;
  for (const auto& m : own.reporting.per_criterion) {
    if (!m.is_deterministic()) {
      designated_pure = false;
      break;
    }
    designated_maps.push_back(encode_map(m.targets()));
  }

  BestResponseResult result;
  result.reviewer = k;
  result.best_deviation_utility = -std::numeric_limits<double>::infinity();
  bool designated_seen = false;

  for (int d = 0; d <= T; ++d) {
    StrategyProfile profile = designated;
    profile[k].effort = d;
    const InducedJoint joint(prior, profile);
    const std::vector<double> expert = honest_expert_scores(joint, k);
    double base = -cost.total(d);
    for (int t = 0; t < T; ++t) base += hp.a(k, t) * expert[static_cast<std::size_t>(t)];

    // Weighted target value of every map, per criterion.
    std::vector<std::vector<double>> values(static_cast<std::size_t>(T));
    std::vector<std::vector<std::vector<double>>> v_tables(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      const int dt = h.alphabet(t);
      v_tables[static_cast<std::size_t>(t)] = target_values(joint, k, t, peer_books);
      const auto& v = v_tables[static_cast<std::size_t>(t)];
      auto& vals = values[static_cast<std::size_t>(t)];
      vals.resize(maps_per_criterion[static_cast<std::size_t>(t)]);
      for (std::size_t mi = 0; mi < vals.size(); ++mi) {
        const std::vector<int> map = decode_map(mi, dt);
        double s = 0.0;
        for (int c = 0; c < dt; ++c) {
          s += v[static_cast<std::size_t>(c)][static_cast<std::size_t>(map[static_cast<std::size_t>(c)])];
        }
        vals[mi] = hp.b(k, t) * s;
      }
    }

    if (d == own.effort) {
      double u = base;
      for (int t = 0; t < T; ++t) {
        const auto& map = own.reporting.per_criterion[static_cast<std::size_t>(t)];
        const auto& v = v_tables[static_cast<std::size_t>(t)];
        double s = 0.0;
        for (int c = 0; c < map.size(); ++c) {
          for (int r = 0; r < map.size(); ++r) {
            s += map(c, r) * v[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
          }
        }
        u += hp.b(k, t) * s;
      }
      result.designated_utility = u;
      designated_seen = true;
    }

    // Lexicographic walk over (map_0, ..., map_{T-1}); first maximum wins.
    std::vector<std::size_t> index(static_cast<std::size_t>(T), 0);
    while (true) {
      const bool is_designated = designated_pure && d == own.effort && index == designated_maps;
      if (!is_designated) {
        ++result.enumerated;
        double u = base;
        for (int t = 0; t < T; ++t) u += values[static_cast<std::size_t>(t)][index[static_cast<std::size_t>(t)]];
        if (u > result.best_deviation_utility) {
          result.best_deviation_utility = u;
          result.best_deviation.effort = d;
          result.best_deviation.maps.clear();
          for (int t = 0; t < T; ++t) {
            result.best_deviation.maps.push_back(decode_map(index[static_cast<std::size_t>(t)], h.alphabet(t)));
          }
        }
      }
      int t = T - 1;
      for (; t >= 0; --t) {
        const auto ut = static_cast<std::size_t>(t);
        if (++index[ut] < maps_per_criterion[ut]) break;
        index[ut] = 0;
      }
      if (t < 0) break;
    }
  }
  if (!designated_seen) throw UsageError("designated effort outside 0..T");
  result.gap = result.designated_utility - result.best_deviation_utility;

  if (options.prediction_spot_check) {
    const auto [gain, checks] = spot_check_predictions(des_joint, k);
    result.prediction_spot_check_gain = gain;
    result.prediction_spot_checks = checks;
  }
  return result;
}

double deviation_utility_by_enumeration(std::shared_ptr<const JointPrior> prior,
                                        const Hyperparameters& hp, Reviewer k,
                                        const StrategyProfile& designated,
                                        const EffortCost& cost,
                                        const Deviation& deviation) {
  const CriteriaHierarchy& h = prior->hierarchy();
  const InducedJoint des_joint(prior, designated);
  StrategyProfile profile = designated;
  profile[k] = deviation.to_strategy(h);
  const InducedJoint joint(prior, profile);
  ForecastBook books = designated_peer_books(des_joint);
  books.replace_expert(k, ForecastBook::honest(joint));
  const ExpectedPaymentReport report = expected_payment_exact(joint, hp, books);
  return report[k].total - cost.total(deviation.effort);
}

PropertyVerdict verify_equilibrium_properties(std::shared_ptr<const JointPrior> prior,
                                              const Hyperparameters& hp,
                                              const std::array<EffortCost, 3>& costs,
                                              const BestResponseOptions& options,
                                              bool search_deviations) {
  const CriteriaHierarchy& h = prior->hierarchy();
  const int T = h.criteria();
  PropertyVerdict v;
  v.relevance = check_assumptions(*prior).stochastic_relevance;
  v.weak_only = !v.relevance;
  if (v.weak_only) {
    v.notes.push_back("prior fails stochastic relevance; strict comparisons relaxed to weak");
  }

  const InducedJoint zero(prior, StrategyProfile::zero_effort_constant(h, 0));
  const ExpectedPaymentReport rz = expected_payment_exact(zero, hp);
  for (Reviewer k : kAllReviewers) {
    v.max_zero_expected = std::max(v.max_zero_expected, std::abs(rz[k].total));
    v.max_zero_realized = std::max(v.max_zero_realized, rz[k].max_abs_realized);
  }
  v.zero_payment_pass = v.max_zero_expected <= kNormalizationTolerance && v.max_zero_realized == 0.0;
  if (!v.zero_payment_pass) v.notes.push_back("uninformative profile is paid a nonzero amount");

  const StrategyProfile truthful = StrategyProfile::truthful_full_effort(h);
  const InducedJoint tj(prior, truthful);
  const ExpectedPaymentReport rt = expected_payment_exact(tj, hp);
  v.ir_pass = true;
  v.dominance_pass = true;
  double informative = 0.0, uninformative = 0.0;
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    v.informative_utility[ki] = expected_utility(rt, k, costs[ki], T);
    v.uninformative_utility[ki] = expected_utility(rz, k, costs[ki], 0);
    informative += v.informative_utility[ki];
    uninformative += v.uninformative_utility[ki];
    if (!(v.informative_utility[ki] > 0.0)) {
      v.ir_pass = false;
      v.notes.push_back("reviewer " + std::string(reviewer_name(k)) +
                        " has nonpositive utility under truthful full effort");
    }
    if (!(v.informative_utility[ki] > v.uninformative_utility[ki])) v.dominance_pass = false;
  }
  if (!(informative > uninformative)) v.dominance_pass = false;
  if (!v.dominance_pass) v.notes.push_back("informative play does not beat uninformative play");
  if (!search_deviations) return v;

  v.strict_bne_pass = true;
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    v.best_responses[ki] = best_response_search(prior, hp, k, truthful, costs[ki], options);
    const auto& br = v.best_responses[ki];
    const bool ok = v.weak_only ? br.gap >= -kIdentityTolerance : br.gap > 0.0;
    const bool predictions_ok = br.prediction_spot_checks == 0 ||
                                (v.weak_only ? br.prediction_spot_check_gain <= kIdentityTolerance
                                             : br.prediction_spot_check_gain < 0.0);
    if (!ok || !predictions_ok) {
      v.strict_bne_pass = false;
      std::ostringstream os;
      os << "reviewer " << reviewer_name(k);
      if (!ok) os << " profits by deviating to " << br.best_deviation.describe() << " (gain " << -br.gap << ")";
      if (!predictions_ok) os << " gains from a perturbed forecast";
      v.notes.push_back(os.str());
    }
  }
  return v;
}

}  // namespace hdipp
