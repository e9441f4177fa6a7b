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

#include "hdipp/mechanism.h"

#include <cmath>
#include <string>
#include <utility>

#include "hdipp/rng.h"

namespace hdipp {
namespace {

std::size_t stage_index(ForecastStage stage) { return static_cast<std::size_t>(stage); }

// Number of source reports visible when the forecast is elicited.
int visible_source_reports(int criterion, ForecastStage stage) {
  return stage == ForecastStage::kFirst ? criterion : criterion + 1;
}

std::size_t expected_keys(const CriteriaHierarchy& h, int effort, int criterion,
                          ForecastStage stage) {
  std::size_t n = 1;
  for (int t = 0; t < effort; ++t) n *= static_cast<std::size_t>(h.alphabet(t));
  for (int t = 0; t < visible_source_reports(criterion, stage); ++t) {
    n *= static_cast<std::size_t>(h.alphabet(t));
  }
  return n;
}

int sample_row(const std::vector<double>& row, double u) {
  double cum = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] <= 0.0) continue;
    last = static_cast<int>(i);
    cum += row[i];
    if (u < cum) return last;
  }
  return last;
}

}  // namespace

std::array<RoleAssignment, 3> RoleAssignment::cyclic() {
  std::array<RoleAssignment, 3> out{};
  for (Reviewer k : kAllReviewers) {
    out[static_cast<std::size_t>(index_of(k))] = {k, target_of(k), source_of(k)};
  }
  return out;
}

Hyperparameters Hyperparameters::uniform(int criteria, double alpha, double beta) {
  Hyperparameters hp;
  for (std::size_t k = 0; k < 3; ++k) {
    hp.alpha[k].assign(static_cast<std::size_t>(criteria), alpha);
    hp.beta[k].assign(static_cast<std::size_t>(criteria), beta);
  }
  return hp;
}

void Hyperparameters::validate(int criteria) const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (alpha[k].size() != static_cast<std::size_t>(criteria) ||
        beta[k].size() != static_cast<std::size_t>(criteria)) {
      throw UsageError("hyperparameters need one alpha and beta per criterion");
    }
    for (std::size_t t = 0; t < alpha[k].size(); ++t) {
      if (!std::isfinite(alpha[k][t]) || alpha[k][t] < 0.0 ||
          !std::isfinite(beta[k][t]) || beta[k][t] < 0.0) {
        throw UsageError("hyperparameters must be finite and nonnegative");
      }
    }
  }
}

ForecastBook::ForecastBook(CriteriaHierarchy hierarchy, std::array<int, 3> expert_effort,
                           Tables tables)
    : hierarchy_(std::move(hierarchy)), effort_(expert_effort), tables_(std::move(tables)) {
  const int T = hierarchy_.criteria();
  for (Reviewer e : kAllReviewers) {
    const auto ei = static_cast<std::size_t>(index_of(e));
    if (effort_[ei] < 0 || effort_[ei] > T) throw UsageError("forecast book: bad effort");
    if (tables_[ei].size() != static_cast<std::size_t>(T)) {
      throw UsageError("forecast book: expected one entry per criterion");
    }
    for (int t = 0; t < T; ++t) {
      for (ForecastStage stage : {ForecastStage::kFirst, ForecastStage::kSecond}) {
        const auto& forecasts = tables_[ei][static_cast<std::size_t>(t)][stage_index(stage)];
        if (forecasts.size() != expected_keys(hierarchy_, effort_[ei], t, stage)) {
          throw UsageError("forecast book: wrong number of forecasts for expert " +
                           std::string(reviewer_name(e)) + ", criterion " +
                           std::to_string(t));
        }
        for (const auto& f : forecasts) {
          if (f.size() != hierarchy_.alphabet(t)) {
            throw UsageError("forecast book: forecast size does not match the scale");
          }
        }
      }
    }
  }
}

ForecastBook ForecastBook::honest(const InducedJoint& joint) {
  const CriteriaHierarchy& h = joint.prior().hierarchy();
  const int T = h.criteria();
  std::array<int, 3> effort{};
  Tables tables;
  for (Reviewer e : kAllReviewers) {
    const auto ei = static_cast<std::size_t>(index_of(e));
    const int te = joint.profile()[e].effort;
    effort[ei] = te;
    tables[ei].resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      for (ForecastStage stage : {ForecastStage::kFirst, ForecastStage::kSecond}) {
        std::vector<Variable> vars = {{target_of(e), t, VarKind::kReported}};
        for (int s = 0; s < te; ++s) vars.push_back({e, s, VarKind::kTrue});
        for (int s = 0; s < visible_source_reports(t, stage); ++s) {
          vars.push_back({source_of(e), s, VarKind::kReported});
        }
        const Table m = joint.marginal(vars);
        const int d = h.alphabet(t);
        const std::size_t keys = m.size() / static_cast<std::size_t>(d);
        const std::size_t stride = m.stride(0);
        auto& out = tables[ei][static_cast<std::size_t>(t)][stage_index(stage)];
        out.reserve(keys);
        std::vector<double> w(static_cast<std::size_t>(d));
        for (std::size_t key = 0; key < keys; ++key) {
          double mass = 0.0;
          for (int v = 0; v < d; ++v) {
            w[static_cast<std::size_t>(v)] = m[static_cast<std::size_t>(v) * stride + key];
            mass += w[static_cast<std::size_t>(v)];
          }
          out.push_back(mass > 0.0 ? Distribution::from_weights(w)
                                   : Distribution::uniform(d));
        }
      }
    }
  }
  return ForecastBook(h, effort, std::move(tables));
}

std::size_t ForecastBook::key_count(Reviewer expert, int criterion,
                                    ForecastStage stage) const {
  return tables_[static_cast<std::size_t>(index_of(expert))]
                [static_cast<std::size_t>(criterion)][stage_index(stage)]
                    .size();
}

std::size_t ForecastBook::key(Reviewer expert, int criterion, ForecastStage stage,
                              std::span<const int> expert_signals,
                              std::span<const int> source_reports) const {
  const int te = expert_effort(expert);
  const int visible = visible_source_reports(criterion, stage);
  if (static_cast<int>(expert_signals.size()) < te ||
      static_cast<int>(source_reports.size()) < visible) {
    throw UsageError("forecast lookup: not enough observed signals");
  }
  std::size_t k = 0;
  for (int t = 0; t < te; ++t) {
    k = k * static_cast<std::size_t>(hierarchy_.alphabet(t)) +
        static_cast<std::size_t>(expert_signals[static_cast<std::size_t>(t)]);
  }
  for (int t = 0; t < visible; ++t) {
    k = k * static_cast<std::size_t>(hierarchy_.alphabet(t)) +
        static_cast<std::size_t>(source_reports[static_cast<std::size_t>(t)]);
  }
  return k;
}

const Distribution& ForecastBook::entry(Reviewer expert, int criterion,
                                        ForecastStage stage, std::size_t key) const {
  return tables_[static_cast<std::size_t>(index_of(expert))]
                [static_cast<std::size_t>(criterion)][stage_index(stage)]
                    .at(key);
}

void ForecastBook::set_entry(Reviewer expert, int criterion, ForecastStage stage,
                             std::size_t key, Distribution forecast) {
  auto& slot = tables_[static_cast<std::size_t>(index_of(expert))]
                      [static_cast<std::size_t>(criterion)][stage_index(stage)]
                          .at(key);
  if (forecast.size() != slot.size()) {
    throw UsageError("forecast book: replacement forecast has the wrong size");
  }
  slot = std::move(forecast);
}

const Distribution& ForecastBook::lookup(Reviewer expert, int criterion,
                                         ForecastStage stage,
                                         std::span<const int> expert_signals,
                                         std::span<const int> source_reports) const {
  return entry(expert, criterion, stage,
               key(expert, criterion, stage, expert_signals, source_reports));
}

void ForecastBook::apply_floor(double floor) {
  for (auto& per_expert : tables_) {
    for (auto& stages : per_expert) {
      for (auto& forecasts : stages) {
        for (auto& f : forecasts) f = apply_forecast_floor(f, floor);
      }
    }
  }
}

void ForecastBook::replace_expert(Reviewer expert, const ForecastBook& other) {
  const auto ei = static_cast<std::size_t>(index_of(expert));
  effort_[ei] = other.effort_[ei];
  tables_[ei] = other.tables_[ei];
}

const Prediction& Transcript::prediction(Reviewer expert, int criterion) const {
  for (const auto& p : predictions) {
    if (p.expert == expert && p.criterion == criterion) return p;
  }
  throw UsageError("transcript has no forecast for expert " +
                   std::string(reviewer_name(expert)) + " on criterion " +
                   std::to_string(criterion));
}

Transcript play_round(const ForecastBook& books,
                      const std::array<std::vector<int>, 3>& true_signals,
                      const std::array<std::vector<int>, 3>& reports) {
  const int T = books.hierarchy().criteria();
  for (const auto& r : reports) {
    if (static_cast<int>(r.size()) != T) throw UsageError("reports must cover every criterion");
  }
  Transcript out;
  out.reports = reports;
  out.predictions.reserve(3 * static_cast<std::size_t>(T));
  out.reveal_log.reserve(9 * static_cast<std::size_t>(T));
  // Each expert's game sees only their own signals and the source's reports;
  // nothing flows between games.
  for (Reviewer e : kAllReviewers) {
    const auto& own = true_signals[static_cast<std::size_t>(index_of(e))];
    const auto& source = reports[static_cast<std::size_t>(index_of(source_of(e)))];
    for (int t = 0; t < T; ++t) {
      const std::span<const int> before(source.data(), static_cast<std::size_t>(t));
      Distribution first = books.lookup(e, t, ForecastStage::kFirst, own, before);
      out.reveal_log.push_back({e, t, RevealKind::kFirstElicited});
      out.reveal_log.push_back({e, t, RevealKind::kRevealed});
      const std::span<const int> through(source.data(), static_cast<std::size_t>(t + 1));
      Distribution second = books.lookup(e, t, ForecastStage::kSecond, own, through);
      out.reveal_log.push_back({e, t, RevealKind::kSecondElicited});
      out.predictions.push_back(
          {e, target_of(e), source_of(e), t, std::move(first), std::move(second)});
    }
  }
  return out;
}

double expert_component(const Transcript& transcript, Reviewer k, int t) {
  const Prediction& p = transcript.prediction(k, t);
  const int x = transcript.reports[static_cast<std::size_t>(index_of(target_of(k)))]
                                  [static_cast<std::size_t>(t)];
  return log_score(x, p.first) + log_score(x, p.second);
}

double target_component(const Transcript& transcript, Reviewer k, int t) {
  const Prediction& p = transcript.prediction(expert_of(k), t);
  const int x = transcript.reports[static_cast<std::size_t>(index_of(k))]
                                  [static_cast<std::size_t>(t)];
  return log_score(x, p.second) - log_score(x, p.first);
}

double criterion_payment(const Transcript& transcript, const Hyperparameters& hp,
                         Reviewer k, int t) {
  return hp.a(k, t) * expert_component(transcript, k, t) +
         hp.b(k, t) * target_component(transcript, k, t);
}

PaymentBreakdown payment_breakdown(const Transcript& transcript,
                                   const Hyperparameters& hp, Reviewer k) {
  const int T = static_cast<int>(transcript.reports[0].size());
  PaymentBreakdown out;
  out.reviewer = k;
  for (int t = 0; t < T; ++t) {
    const double e = expert_component(transcript, k, t);
    const double g = target_component(transcript, k, t);
    out.expert.push_back(e);
    out.target.push_back(g);
    const double w = hp.a(k, t) * e + hp.b(k, t) * g;
    out.weighted.push_back(w);
    out.total += w;
  }
  return out;
}

PaymentTotals total_payment(std::span<const PaymentBreakdown> breakdowns) {
  PaymentTotals out;
  for (const auto& b : breakdowns) {
    out.per_reviewer[static_cast<std::size_t>(index_of(b.reviewer))] += b.total;
    out.aggregate += b.total;
  }
  return out;
}

RoundResult run_review_round(const InducedJoint& joint, const Hyperparameters& hp,
                             std::uint64_t seed) {
  return run_review_round(joint, hp, seed, ForecastBook::honest(joint));
}

RoundResult run_review_round(const InducedJoint& joint, const Hyperparameters& hp,
                             std::uint64_t seed, const ForecastBook& books) {
  const int T = joint.criteria();
  hp.validate(T);
  const RealizedSignals signals = realize_signals(joint, Rng::derive(seed, 0));
  Rng report_rng(Rng::derive(seed, 1));
  std::array<std::vector<int>, 3> reports;
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    const auto& maps = joint.profile()[k].reporting.per_criterion;
    for (int t = 0; t < T; ++t) {
      const auto& map = maps[static_cast<std::size_t>(t)];
      const int c = signals.completed[ki][static_cast<std::size_t>(t)];
      // Always draw, so the stream position does not depend on the maps.
      const double u = report_rng.uniform();
      reports[ki].push_back(sample_row(map.row(c), u));
    }
  }
  RoundResult out;
  out.transcript = play_round(books, signals.true_signals, reports);
  out.transcript.seed = seed;
  for (Reviewer k : kAllReviewers) {
    out.payments[static_cast<std::size_t>(index_of(k))] =
        payment_breakdown(out.transcript, hp, k);
  }
  return out;
}

}  // namespace hdipp
