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

#include "hdipp/reviewers.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hdipp/rng.h"

namespace hdipp {

EffortCost::EffortCost(std::vector<double> costs) : costs_(std::move(costs)) {
  if (costs_.empty()) throw UsageError("effort cost needs e(0)");
  if (costs_[0] != 0.0) throw UsageError("effort cost must have e(0) = 0");
  for (std::size_t t = 1; t < costs_.size(); ++t) {
    if (!std::isfinite(costs_[t]) || !(costs_[t] > costs_[t - 1])) {
      throw UsageError("effort cost must be finite and strictly increasing");
    }
  }
}

ReportingMap::ReportingMap(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  const std::size_t n = rows_.size();
  if (n < 2) throw UsageError("reporting map needs at least two signals");
  for (const auto& row : rows_) {
    if (row.size() != n) throw UsageError("reporting map must be square");
    double total = 0.0;
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw UsageError("reporting map entries must be nonnegative");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw UsageError("reporting map rows must sum to 1");
    }
  }
}

ReportingMap ReportingMap::identity(int size) {
  std::vector<int> t(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) t[static_cast<std::size_t>(i)] = i;
  return deterministic(t);
}

ReportingMap ReportingMap::constant(int size, int value) {
  return deterministic(std::vector<int>(static_cast<std::size_t>(size), value));
}

ReportingMap ReportingMap::deterministic(std::span<const int> targets) {
  const std::size_t n = targets.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= n) {
      throw UsageError("reporting map target out of range");
    }
    rows[i][static_cast<std::size_t>(targets[i])] = 1.0;
  }
  return ReportingMap(std::move(rows));
}

bool ReportingMap::is_identity() const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i][i] != 1.0) return false;
  }
  return true;
}

bool ReportingMap::is_deterministic() const {
  for (const auto& row : rows_) {
    if (std::none_of(row.begin(), row.end(), [](double v) { return v == 1.0; })) {
      return false;
    }
  }
  return true;
}

std::vector<int> ReportingMap::targets() const {
  std::vector<int> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    const auto it = std::find(row.begin(), row.end(), 1.0);
    if (it == row.end()) throw UsageError("reporting map is not deterministic");
    out.push_back(static_cast<int>(it - row.begin()));
  }
  return out;
}

ReportingStrategy ReportingStrategy::truthful(const CriteriaHierarchy& h) {
  ReportingStrategy s;
  for (int d : h.alphabet_sizes) s.per_criterion.push_back(ReportingMap::identity(d));
  return s;
}

ReportingStrategy ReportingStrategy::constant(const CriteriaHierarchy& h,
                                              std::span<const int> values) {
  if (values.size() != h.alphabet_sizes.size()) {
    throw UsageError("constant strategy needs one value per criterion");
  }
  ReportingStrategy s;
  for (std::size_t t = 0; t < values.size(); ++t) {
    s.per_criterion.push_back(ReportingMap::constant(h.alphabet_sizes[t], values[t]));
  }
  return s;
}

bool ReportingStrategy::is_truthful() const {
  return std::all_of(per_criterion.begin(), per_criterion.end(),
                     [](const ReportingMap& m) { return m.is_identity(); });
}

StrategyProfile StrategyProfile::truthful_full_effort(const CriteriaHierarchy& h) {
  StrategyProfile p;
  for (auto& r : p.reviewers) {
    r.effort = h.criteria();
    r.reporting = ReportingStrategy::truthful(h);
  }
  return p;
}

StrategyProfile StrategyProfile::zero_effort_constant(const CriteriaHierarchy& h,
                                                      int value) {
  std::vector<int> values;
  for (int d : h.alphabet_sizes) values.push_back(std::clamp(value, 0, d - 1));
  StrategyProfile p;
  for (auto& r : p.reviewers) {
    r.effort = 0;
    r.reporting = ReportingStrategy::constant(h, values);
  }
  return p;
}

void StrategyProfile::validate(const CriteriaHierarchy& h) const {
  for (const auto& r : reviewers) {
    if (r.effort < 0 || r.effort > h.criteria()) {
      throw UsageError("effort level outside 0..T");
    }
    if (r.reporting.per_criterion.size() != h.alphabet_sizes.size()) {
      throw UsageError("reporting strategy does not cover every criterion");
    }
    for (int t = 0; t < h.criteria(); ++t) {
      if (r.reporting.per_criterion[static_cast<std::size_t>(t)].size() != h.alphabet(t)) {
        throw UsageError("reporting map size does not match the criterion scale");
      }
    }
  }
}

std::array<std::size_t, 3> split_cell(const JointPrior& prior, std::size_t flat) {
  const std::size_t n = prior.hierarchy().own_cells();
  return {flat / (n * n), (flat / n) % n, flat % n};
}

void decode_own(const CriteriaHierarchy& h, std::size_t own, std::span<int> out) {
  for (int t = h.criteria() - 1; t >= 0; --t) {
    const auto d = static_cast<std::size_t>(h.alphabet(t));
    out[static_cast<std::size_t>(t)] = static_cast<int>(own % d);
    own /= d;
  }
}

namespace {

// Conditional mode of criterion `target` given the first `observed` criteria
// of a reviewer, for every own-signal prefix. `own_table` is the reviewer's
// own marginal over all T criteria.
int mode_given_prefix(const Table& own_table, std::span<const int> prefix,
                      int target) {
  std::vector<int> keep;
  for (std::size_t t = 0; t < prefix.size(); ++t) keep.push_back(static_cast<int>(t));
  keep.push_back(target);
  const Table m = marginal(own_table, keep);
  const int d = m.shape().back();
  std::size_t base = 0;
  for (std::size_t t = 0; t < prefix.size(); ++t) {
    base += m.stride(static_cast<int>(t)) * static_cast<std::size_t>(prefix[t]);
  }
  int best = 0;
  for (int v = 1; v < d; ++v) {
    if (m[base + static_cast<std::size_t>(v)] > m[base + static_cast<std::size_t>(best)]) best = v;
  }
  return best;
}

}  // namespace

int best_guess(const JointPrior& prior, Reviewer reviewer,
               std::span<const int> observed, int target_criterion) {
  const int T = prior.criteria();
  if (target_criterion < 0 || target_criterion >= T) {
    throw UsageError("best_guess: target criterion out of range");
  }
  if (static_cast<int>(observed.size()) > target_criterion) {
    throw UsageError("best_guess: target criterion must lie above the observed ones");
  }
  for (std::size_t t = 0; t < observed.size(); ++t) {
    if (observed[t] < 0 || observed[t] >= prior.hierarchy().alphabet(static_cast<int>(t))) {
      throw UsageError("best_guess: observed signal out of range");
    }
  }
  const std::vector<int> own_axes = prior.axes(reviewer, 0, T);
  const Table own = marginal(prior.table(), own_axes);
  return mode_given_prefix(own, observed, target_criterion);
}

InducedJoint::InducedJoint(std::shared_ptr<const JointPrior> prior,
                           StrategyProfile profile)
    : prior_(std::move(prior)), profile_(std::move(profile)) {
  const CriteriaHierarchy& h = prior_->hierarchy();
  profile_.validate(h);
  const int T = h.criteria();
  own_cells_ = h.own_cells();
  std::vector<int> signals(static_cast<std::size_t>(T));
  for (Reviewer r : kAllReviewers) {
    const int effort = profile_[r].effort;
    const Table own = hdipp::marginal(prior_->table(), prior_->axes(r, 0, T));
    // Guesses depend only on the completed prefix; cache per prefix.
    std::vector<std::vector<int>> guess_cache;
    std::size_t prefix_cells = 1;
    for (int t = 0; t < effort; ++t) prefix_cells *= static_cast<std::size_t>(h.alphabet(t));
    if (effort < T) {
      guess_cache.assign(prefix_cells, {});
      std::vector<int> prefix(static_cast<std::size_t>(effort));
      for (std::size_t p = 0; p < prefix_cells; ++p) {
        std::size_t rem = p;
        for (int t = effort - 1; t >= 0; --t) {
          prefix[static_cast<std::size_t>(t)] = static_cast<int>(rem % static_cast<std::size_t>(h.alphabet(t)));
          rem /= static_cast<std::size_t>(h.alphabet(t));
        }
        for (int t = effort; t < T; ++t) {
          guess_cache[p].push_back(mode_given_prefix(own, prefix, t));
        }
      }
    }
    auto& completed = completed_[static_cast<std::size_t>(index_of(r))];
    completed.resize(own_cells_ * static_cast<std::size_t>(T));
    for (std::size_t o = 0; o < own_cells_; ++o) {
      decode_own(h, o, signals);
      std::size_t prefix_index = 0;
      for (int t = 0; t < effort; ++t) {
        prefix_index = prefix_index * static_cast<std::size_t>(h.alphabet(t)) +
                       static_cast<std::size_t>(signals[static_cast<std::size_t>(t)]);
      }
      for (int t = 0; t < T; ++t) {
        completed[o * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)] =
            t < effort ? signals[static_cast<std::size_t>(t)]
                       : guess_cache[prefix_index][static_cast<std::size_t>(t - effort)];
      }
    }
  }
}

std::span<const int> InducedJoint::completed(Reviewer r, std::size_t own) const {
  const auto T = static_cast<std::size_t>(criteria());
  return std::span<const int>(completed_[static_cast<std::size_t>(index_of(r))])
      .subspan(own * T, T);
}

Table InducedJoint::marginal(std::span<const Variable> vars) const {
  const CriteriaHierarchy& h = prior_->hierarchy();
  const int T = h.criteria();
  std::vector<int> shape;
  for (const auto& v : vars) {
    if (v.criterion < 0 || v.criterion >= T) {
      throw UsageError("induced joint: variable criterion out of range");
    }
    shape.push_back(h.alphabet(v.criterion));
  }
  Table out = Table::zeros(shape);

  struct Reported {
    std::size_t stride;
    const ReportingMap* map;
    Reviewer reviewer;
    int criterion;
  };
  std::vector<Reported> reported;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].kind == VarKind::kReported) {
      reported.push_back({out.stride(static_cast<int>(i)),
                          &profile_[vars[i].reviewer].reporting.per_criterion[static_cast<std::size_t>(vars[i].criterion)],
                          vars[i].reviewer, vars[i].criterion});
    }
  }

  std::array<std::vector<int>, 3> true_signals;
  for (auto& s : true_signals) s.resize(static_cast<std::size_t>(T));
  std::vector<int> rep_value(reported.size());
  std::vector<int> rep_completed(reported.size());

  const Table& joint = prior_->table();
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    const double p = joint[flat];
    if (p <= 0.0) continue;
    const auto own = split_cell(*prior_, flat);
    for (int r = 0; r < 3; ++r) decode_own(h, own[static_cast<std::size_t>(r)], true_signals[static_cast<std::size_t>(r)]);

    std::size_t base = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& v = vars[i];
      const auto r = static_cast<std::size_t>(index_of(v.reviewer));
      int value = 0;
      switch (v.kind) {
        case VarKind::kTrue:
          value = true_signals[r][static_cast<std::size_t>(v.criterion)];
          break;
        case VarKind::kCompleted:
          value = completed(v.reviewer, own[r])[static_cast<std::size_t>(v.criterion)];
          break;
        case VarKind::kReported:
          continue;
      }
      base += out.stride(static_cast<int>(i)) * static_cast<std::size_t>(value);
    }
    if (reported.empty()) {
      out[base] += p;
      continue;
    }
    for (std::size_t j = 0; j < reported.size(); ++j) {
      rep_completed[j] = completed(reported[j].reviewer,
                                   own[static_cast<std::size_t>(index_of(reported[j].reviewer))])
                             [static_cast<std::size_t>(reported[j].criterion)];
      rep_value[j] = 0;
    }
    // Odometer over every reported value combination.
    const int n = static_cast<int>(reported.size());
    while (true) {
      double w = p;
      std::size_t index = base;
      for (std::size_t j = 0; j < reported.size() && w > 0.0; ++j) {
        w *= (*reported[j].map)(rep_completed[j], rep_value[j]);
        index += reported[j].stride * static_cast<std::size_t>(rep_value[j]);
      }
      if (w > 0.0) out[index] += w;
      int j = n - 1;
      for (; j >= 0; --j) {
        const auto uj = static_cast<std::size_t>(j);
        if (++rep_value[uj] < reported[uj].map->size()) break;
        rep_value[uj] = 0;
      }
      if (j < 0) break;
    }
  }
  return out;
}

Table InducedJoint::full_tensor(std::size_t max_cells) const {
  const int T = criteria();
  std::vector<Variable> vars;
  for (VarKind kind : {VarKind::kTrue, VarKind::kReported}) {
    for (Reviewer r : kAllReviewers) {
      for (int t = 0; t < T; ++t) vars.push_back({r, t, kind});
    }
  }
  std::size_t cells = 1;
  for (const auto& v : vars) cells *= static_cast<std::size_t>(prior_->hierarchy().alphabet(v.criterion));
  if (cells > max_cells) throw CapacityError("induced joint tensor too large");
  return marginal(vars);
}

RealizedSignals realize_signals(const InducedJoint& joint, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const double u = rng.uniform();
  const Table& table = joint.prior().table();
  std::size_t chosen = table.size();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t flat = 0; flat < table.size(); ++flat) {
    if (table[flat] <= 0.0) continue;
    last_positive = flat;
    cum += table[flat];
    if (u < cum) {
      chosen = flat;
      break;
    }
  }
  if (chosen == table.size()) chosen = last_positive;

  const CriteriaHierarchy& h = joint.prior().hierarchy();
  RealizedSignals out;
  const auto own = split_cell(joint.prior(), chosen);
  for (Reviewer r : kAllReviewers) {
    const auto i = static_cast<std::size_t>(index_of(r));
    out.true_signals[i].resize(static_cast<std::size_t>(h.criteria()));
    decode_own(h, own[i], out.true_signals[i]);
    const auto c = joint.completed(r, own[i]);
    out.completed[i].assign(c.begin(), c.end());
  }
  return out;
}

Distribution honest_prediction(const InducedJoint& joint, Reviewer expert,
                               Reviewer target, Reviewer source,
                               std::span<const int> expert_signals,
                               std::span<const int> source_reports,
                               int predict_criterion) {
  if (expert == target || expert == source || target == source) {
    throw UsageError("honest_prediction: expert, target and source must differ");
  }
  const int T = joint.criteria();
  const int effort = joint.profile()[expert].effort;
  if (static_cast<int>(expert_signals.size()) != effort) {
    throw UsageError("honest_prediction: expert signals must cover the completed criteria");
  }
  if (predict_criterion < 0 || predict_criterion >= T ||
      static_cast<int>(source_reports.size()) > T) {
    throw UsageError("honest_prediction: criterion out of range");
  }
  std::vector<Variable> vars = {{target, predict_criterion, VarKind::kReported}};
  for (int t = 0; t < effort; ++t) vars.push_back({expert, t, VarKind::kTrue});
  for (std::size_t t = 0; t < source_reports.size(); ++t) {
    vars.push_back({source, static_cast<int>(t), VarKind::kReported});
  }
  const Table table = joint.marginal(vars);
  std::vector<AxisValue> given;
  for (int t = 0; t < effort; ++t) given.push_back({1 + t, expert_signals[static_cast<std::size_t>(t)]});
  for (std::size_t t = 0; t < source_reports.size(); ++t) {
    given.push_back({1 + effort + static_cast<int>(t), source_reports[t]});
  }
  return conditional(table, 0, given);
}

}  // namespace hdipp
