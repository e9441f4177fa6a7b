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

#include "hdipp/io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hdipp/common.h"

namespace hdipp {
namespace {

template <typename F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed " + what + ": " + e.what());
  }
}

Json per_reviewer(const std::array<std::vector<double>, 3>& v) {
  Json j = Json::object();
  for (Reviewer k : kAllReviewers) {
    j[std::string(reviewer_name(k))] = v[static_cast<std::size_t>(index_of(k))];
  }
  return j;
}

std::array<std::vector<double>, 3> per_reviewer_from(const Json& j) {
  std::array<std::vector<double>, 3> out;
  for (Reviewer k : kAllReviewers) {
    out[static_cast<std::size_t>(index_of(k))] =
        j.at(std::string(reviewer_name(k))).get<std::vector<double>>();
  }
  return out;
}

Json distribution_json(const Distribution& d) {
  return Json(std::vector<double>(d.probabilities().begin(), d.probabilities().end()));
}

std::string name(Reviewer r) { return std::string(reviewer_name(r)); }

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw UsageError("failed writing " + path);
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("invalid JSON in " + what + ": " + e.what());
  }
}

Json load_json(const std::string& path) { return parse_json(read_text_file(path), path); }

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Json to_json(const JointPrior& prior) {
  Json j;
  j["alphabet_sizes"] = prior.hierarchy().alphabet_sizes;
  if (!prior.hierarchy().labels.empty()) j["labels"] = prior.hierarchy().labels;
  const auto data = prior.table().data();
  j["tensor"] = std::vector<double>(data.begin(), data.end());
  return j;
}

CriteriaHierarchy hierarchy_from_json(const Json& j) {
  return guarded("hierarchy", [&] {
    CriteriaHierarchy h;
    h.alphabet_sizes = j.at("alphabet_sizes").get<std::vector<int>>();
    if (j.contains("labels")) h.labels = j.at("labels").get<std::vector<std::string>>();
    h.validate();
    return h;
  });
}

JointPrior prior_from_json(const Json& j) {
  return guarded("prior", [&] {
    CriteriaHierarchy h = hierarchy_from_json(j);
    std::vector<int> shape;
    for (int r = 0; r < 3; ++r) {
      for (int d : h.alphabet_sizes) shape.push_back(d);
    }
    std::vector<double> tensor = j.at("tensor").get<std::vector<double>>();
    if (tensor.size() != cell_count(shape)) {
      throw UsageError("prior tensor has " + std::to_string(tensor.size()) + " entries, expected " +
                       std::to_string(cell_count(shape)));
    }
    return JointPrior(std::move(h), Table(std::move(shape), std::move(tensor)));
  });
}

Json to_json(const Hyperparameters& hp) {
  return Json{{"alpha", per_reviewer(hp.alpha)}, {"beta", per_reviewer(hp.beta)}};
}

Hyperparameters hyperparameters_from_json(const Json& j) {
  return guarded("hyperparameters", [&] {
    // Also accept a solver report, which nests the weights.
    const Json& w = j.contains("hyperparameters") && !j.contains("alpha") ? j.at("hyperparameters") : j;
    Hyperparameters hp;
    hp.alpha = per_reviewer_from(w.at("alpha"));
    hp.beta = per_reviewer_from(w.at("beta"));
    return hp;
  });
}

Json to_json(const std::array<EffortCost, 3>& costs) {
  Json j = Json::object();
  for (Reviewer k : kAllReviewers) {
    const auto c = costs[static_cast<std::size_t>(index_of(k))].costs();
    j[name(k)] = std::vector<double>(c.begin(), c.end());
  }
  return j;
}

std::array<EffortCost, 3> costs_from_json(const Json& j) {
  return guarded("costs", [&] {
    std::array<EffortCost, 3> out;
    const auto raw = per_reviewer_from(j);
    for (std::size_t i = 0; i < 3; ++i) out[i] = EffortCost(raw[i]);
    return out;
  });
}

Json to_json(const StrategyProfile& profile) {
  Json j = Json::object();
  for (Reviewer k : kAllReviewers) {
    const ReviewerStrategy& s = profile[k];
    Json maps = Json::array();
    for (const auto& m : s.reporting.per_criterion) maps.push_back(m.rows());
    j[name(k)] = Json{{"effort", s.effort}, {"reporting", std::move(maps)}};
  }
  return j;
}

StrategyProfile profile_from_json(const Json& j, const CriteriaHierarchy& h) {
  return guarded("profile", [&] {
    StrategyProfile p = StrategyProfile::truthful_full_effort(h);
    for (Reviewer k : kAllReviewers) {
      if (!j.contains(name(k))) continue;
      const Json& r = j.at(name(k));
      ReviewerStrategy& s = p[k];
      s.effort = r.value("effort", h.criteria());
      if (r.contains("reporting")) {
        const Json& rep = r.at("reporting");
        if (rep.is_string()) {
          if (rep.get<std::string>() != "truthful") throw UsageError("unknown reporting keyword");
          s.reporting = ReportingStrategy::truthful(h);
        } else {
          s.reporting.per_criterion.clear();
          for (const Json& m : rep) {
            if (!m.empty() && m.front().is_number()) {
              const auto targets = m.get<std::vector<int>>();
              s.reporting.per_criterion.push_back(ReportingMap::deterministic(targets));
            } else {
              s.reporting.per_criterion.emplace_back(m.get<std::vector<std::vector<double>>>());
            }
          }
        }
      }
    }
    p.validate(h);
    return p;
  });
}

Json to_json(const std::vector<Bid>& bids) {
  Json j = Json::array();
  for (const auto& b : bids) {
    j.push_back({{"paper_id", b.paper_id}, {"author_id", b.author_id}, {"amount", b.amount}});
  }
  return j;
}

std::vector<Bid> bids_from_json(const Json& j) {
  return guarded("bids", [&] {
    std::vector<Bid> out;
    for (const Json& b : j) {
      out.push_back({b.at("paper_id").get<std::string>(), b.value("author_id", std::string()),
                     b.at("amount").get<double>()});
    }
    return out;
  });
}

std::vector<AuthorModel> authors_from_json(const Json& j) {
  return guarded("authors", [&] {
    std::vector<AuthorModel> out;
    for (const Json& a : j) {
      AuthorModel m;
      m.author_id = a.at("author_id").get<std::string>();
      m.value_per_acceptance = a.at("value").get<double>();
      m.acceptance_prob = a.at("papers").get<std::map<std::string, double>>();
      m.validate();
      out.push_back(std::move(m));
    }
    return out;
  });
}

MatchQuality match_quality_from_json(const Json& j) {
  return guarded("match scores", [&] {
    MatchQuality q;
    q.papers = j.at("papers").get<std::vector<std::string>>();
    q.reviewers = j.at("reviewers").get<std::vector<std::string>>();
    q.scores = j.at("scores").get<std::vector<std::vector<double>>>();
    q.capacity = j.value("capacity", 1);
    q.validate();
    return q;
  });
}

std::vector<std::vector<double>> matrix_from_json(const Json& j, const std::string& what) {
  return guarded(what, [&] { return j.get<std::vector<std::vector<double>>>(); });
}

Json to_json(const AssumptionReport& r) {
  return {{"min_entry", r.min_entry},
          {"full_support", r.full_support},
          {"max_conditional_independence_violation", r.max_conditional_independence_violation},
          {"conditional_independence", r.conditional_independence},
          {"min_relevance_gap", r.min_relevance_gap},
          {"stochastic_relevance", r.stochastic_relevance},
          {"pass", r.all_pass()}};
}

Json to_json(const AuctionOutcome& o) {
  return {{"winners", o.winners},
          {"clearing_price", o.clearing_price},
          {"revenue", o.revenue},
          {"losing_bids", to_json(o.losing_bids)}};
}

Json to_json(const TruthfulnessReport& r) {
  return {{"max_violation", r.max_violation},
          {"per_bidder_violation", r.per_bidder_violation},
          {"deviations_checked", r.deviations_checked},
          {"worst_bidder", r.worst_bidder},
          {"worst_bid", r.worst_bid}};
}

Json to_json(const Transcript& t) {
  Json j;
  j["seed"] = t.seed;
  Json reports = Json::object();
  for (Reviewer k : kAllReviewers) reports[name(k)] = t.reports[static_cast<std::size_t>(index_of(k))];
  j["reports"] = std::move(reports);
  Json preds = Json::array();
  for (const auto& p : t.predictions) {
    preds.push_back({{"expert", name(p.expert)},
                     {"target", name(p.target)},
                     {"source", name(p.source)},
                     {"criterion", p.criterion},
                     {"first", distribution_json(p.first)},
                     {"second", distribution_json(p.second)}});
  }
  j["predictions"] = std::move(preds);
  Json log = Json::array();
  for (const auto& e : t.reveal_log) {
    static constexpr const char* kKinds[] = {"first_elicited", "revealed", "second_elicited"};
    log.push_back({{"expert", name(e.expert)},
                   {"criterion", e.criterion},
                   {"event", kKinds[static_cast<int>(e.kind)]}});
  }
  j["reveal_log"] = std::move(log);
  return j;
}

Json to_json(const RoundResult& round) {
  Json payments = Json::object();
  for (const auto& p : round.payments) {
    payments[name(p.reviewer)] = {
        {"expert", p.expert}, {"target", p.target}, {"weighted", p.weighted}, {"total", p.total}};
  }
  return {{"transcript", to_json(round.transcript)}, {"payments", std::move(payments)}};
}

Json to_json(const ExpectedPaymentReport& r) {
  Json j;
  Json reviewers = Json::object();
  for (const auto& e : r.reviewers) {
    reviewers[name(e.reviewer)] = {{"expert", e.expert},
                                   {"target", e.target},
                                   {"expert_closed", e.expert_closed},
                                   {"target_closed", e.target_closed},
                                   {"total", e.total},
                                   {"total_closed", e.total_closed},
                                   {"max_abs_realized", e.max_abs_realized}};
  }
  j["reviewers"] = std::move(reviewers);
  j["aggregate"] = r.aggregate;
  j["closed_form_valid"] = r.closed_form_valid;
  j["max_discrepancy"] = r.max_discrepancy;
  j["realizations"] = r.realizations;
  return j;
}

Json to_json(const MarginalReport& m) {
  Json criteria = Json::array();
  for (const auto& c : m.criteria) {
    criteria.push_back({{"expert_formula", c.expert_formula},
                        {"target_formula", c.target_formula},
                        {"expert_difference", c.expert_difference},
                        {"target_difference", c.target_difference}});
  }
  return {{"reviewer", name(m.reviewer)},
          {"effort", m.effort},
          {"criteria", std::move(criteria)},
          {"weighted_formula", m.weighted_formula},
          {"weighted_difference", m.weighted_difference},
          {"marginal_cost", m.marginal_cost},
          {"max_discrepancy", m.max_discrepancy},
          {"relevance_warning", m.relevance_warning}};
}

Json to_json(const BestResponseResult& b) {
  return {{"reviewer", name(b.reviewer)},
          {"designated_utility", b.designated_utility},
          {"best_deviation_utility", b.best_deviation_utility},
          {"best_deviation", b.best_deviation.describe()},
          {"gap", b.gap},
          {"enumerated", b.enumerated},
          {"prediction_spot_check_gain", b.prediction_spot_check_gain},
          {"prediction_spot_checks", b.prediction_spot_checks}};
}

Json to_json(const PropertyVerdict& v) {
  Json br = Json::array();
  for (const auto& b : v.best_responses) {
    if (b.enumerated > 0) br.push_back(to_json(b));
  }
  return {{"zero_payment_pass", v.zero_payment_pass},
          {"max_zero_expected", v.max_zero_expected},
          {"max_zero_realized", v.max_zero_realized},
          {"ir_pass", v.ir_pass},
          {"informative_utility", v.informative_utility},
          {"uninformative_utility", v.uninformative_utility},
          {"dominance_pass", v.dominance_pass},
          {"strict_bne_pass", v.strict_bne_pass},
          {"best_responses", std::move(br)},
          {"relevance", v.relevance},
          {"weak_only", v.weak_only},
          {"notes", v.notes},
          {"pass", v.all_pass()}};
}

Json to_json(const LpSolution& s, const LpProblem& problem) {
  Json values = Json::object();
  for (std::size_t i = 0; i < s.values.size(); ++i) values[problem.variable_labels[i]] = s.values[i];
  Json slacks = Json::object();
  for (std::size_t i = 0; i < s.slacks.size(); ++i) slacks[problem.row_labels[i]] = s.slacks[i];
  return {{"hyperparameters", to_json(s.hyperparameters)},
          {"values", std::move(values)},
          {"objective", s.objective},
          {"duality_gap", s.duality_gap},
          {"slacks", std::move(slacks)},
          {"binding_caps", s.binding_caps},
          {"epsilon", problem.options.epsilon},
          {"include_ir", problem.options.include_ir},
          {"relevance_warning", problem.relevance_warning}};
}

Json to_json(const SlotPlan& plan, const MatchQuality& quality) {
  Json candidates = Json::array();
  for (const auto& c : plan.candidates) {
    candidates.push_back({{"n", c.n},
                          {"matched", c.matched},
                          {"revenue", c.revenue},
                          {"cost", c.cost},
                          {"budget_ok", c.budget_ok},
                          {"mean_score", c.mean_score},
                          {"score_ok", c.score_ok},
                          {"objective", c.objective},
                          {"note", c.note}});
  }
  Json assignment = Json::array();
  for (std::size_t i = 0; i < plan.assignment.papers.size(); ++i) {
    std::vector<std::string> names;
    for (int r : plan.assignment.reviewers[i]) names.push_back(quality.reviewers[static_cast<std::size_t>(r)]);
    assignment.push_back({{"paper_id", quality.papers[static_cast<std::size_t>(plan.assignment.papers[i])]},
                          {"reviewers", names}});
  }
  return {{"chosen", plan.chosen},
          {"feasible", plan.feasible},
          {"objective", plan.objective},
          {"winners", plan.winners},
          {"assignment", std::move(assignment)},
          {"mean_score", plan.assignment.mean_score},
          {"candidates", std::move(candidates)},
          {"note", plan.note}};
}

Json to_json(const ConferenceReport& r) {
  Json papers = Json::array();
  for (const auto& p : r.papers) {
    papers.push_back({{"paper_id", p.paper_id},
                      {"author_id", p.author_id},
                      {"reviewers", p.reviewers},
                      {"payout", p.payout},
                      {"accepted", p.accepted},
                      {"author_utility", p.author_utility},
                      {"review", to_json(p.review)}});
  }
  Json j;
  j["round"] = r.round;
  j["slots"] = r.slots;
  if (r.plan) {
    j["plan"] = {{"chosen", r.plan->chosen}, {"feasible", r.plan->feasible},
                 {"objective", r.plan->objective}, {"note", r.plan->note}};
  }
  j["auction"] = to_json(r.auction);
  j["papers"] = std::move(papers);
  j["revenue"] = r.revenue;
  j["total_payout"] = r.total_payout;
  j["surplus"] = r.surplus;
  j["author_utility"] = r.author_utility;
  j["reviewer_utility"] = r.reviewer_utility;
  return j;
}

Json to_json(const CreditLedger& ledger) {
  Json entries = Json::array();
  for (const auto& e : ledger.entries()) {
    entries.push_back({{"round", e.round},
                       {"paper_id", e.paper_id},
                       {"agent_id", e.agent_id},
                       {"kind", e.kind == LedgerKind::kAuctionDebit ? "auction_debit" : "review_credit"},
                       {"amount", e.amount}});
  }
  return {{"entries", std::move(entries)}, {"balances", ledger.balances()}};
}

}  // namespace hdipp
