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

#include "hdipp/harness.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "hdipp/common.h"
#include "hdipp/io.h"
#include "hdipp/rng.h"

namespace hdipp {
namespace {

// Flat Dirichlet(1) draw via normalized exponentials.
std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::vector<double> q(n);
  double total = 0.0;
  for (double& v : q) {
    v = -std::log1p(-rng.uniform());
    total += v;
  }
  for (double& v : q) v /= total;
  return q;
}

JointPrior draw_factored_prior(const CriteriaHierarchy& h, Rng& rng, double support_floor) {
  const int T = h.criteria();
  const double cells = std::pow(static_cast<double>(h.own_cells()), 3.0);
  // Layer entries are at least f_t, with prod_t f_t = support_floor.
  const double per_layer = std::pow(support_floor * cells, 1.0 / T);
  std::vector<std::vector<double>> layers;
  for (int t = 0; t < T; ++t) {
    const auto d = static_cast<std::size_t>(h.alphabet(t));
    const std::size_t n = d * d * d;
    const double f = per_layer / static_cast<double>(n);
    std::vector<double> layer = dirichlet(rng, n);
    for (double& v : layer) v = f + (1.0 - f * static_cast<double>(n)) * v;
    layers.push_back(std::move(layer));
  }

  std::vector<int> shape;
  for (int r = 0; r < 3; ++r) {
    for (int t = 0; t < T; ++t) shape.push_back(h.alphabet(t));
  }
  Table table = Table::zeros(shape);
  std::vector<int> x(shape.size());
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    table.unravel(i, x);
    double p = 1.0;
    for (int t = 0; t < T; ++t) {
      const int d = h.alphabet(t);
      const auto ut = static_cast<std::size_t>(t);
      const int a = x[ut], b = x[ut + static_cast<std::size_t>(T)],
                c = x[ut + 2 * static_cast<std::size_t>(T)];
      p *= layers[ut][static_cast<std::size_t>((a * d + b) * d + c)];
    }
    table[i] = p;
    total += p;
  }
  for (std::size_t i = 0; i < table.size(); ++i) table[i] /= total;
  return JointPrior(h, std::move(table));
}

std::string join_path(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

const std::set<std::string> kKnownChecks = {"zero_payment", "ir",       "dominance",
                                            "strict_bne",   "marginal", "closed_form"};

}  // namespace

JointPrior generate_random_prior(const CriteriaHierarchy& hierarchy, std::uint64_t seed,
                                 const PriorGenOptions& options) {
  hierarchy.validate();
  const double cells = std::pow(static_cast<double>(hierarchy.own_cells()), 3.0);
  if (!(options.support_floor >= 0.0) || !(options.support_floor * cells < 1.0)) {
    throw UsageError("support floor times cell count must be below 1");
  }
  if (options.max_rejects < 1) throw UsageError("max_rejects must be positive");
  Rng rng(seed);
  AssumptionReport last;
  for (int attempt = 0; attempt < options.max_rejects; ++attempt) {
    JointPrior prior = draw_factored_prior(hierarchy, rng, options.support_floor);
    last = check_assumptions(prior);
    if (last.all_pass() && last.min_relevance_gap >= options.min_relevance_gap) return prior;
  }
  std::ostringstream os;
  os << "no acceptable prior after " << options.max_rejects
     << " draws; last draw: min entry " << last.min_entry << ", independence violation "
     << last.max_conditional_independence_violation << ", relevance gap "
     << last.min_relevance_gap;
  throw ProbabilityError(os.str());
}

EffortCost generate_increasing_costs(int criteria, std::uint64_t seed, double step_scale) {
  if (criteria < 1 || !(step_scale > 0.0)) throw UsageError("cost generator needs T >= 1 and a positive scale");
  Rng rng(seed);
  std::vector<double> costs = {0.0};
  for (int t = 0; t < criteria; ++t) {
    costs.push_back(costs.back() + step_scale * (0.2 + 0.8 * rng.uniform()));
  }
  return EffortCost(std::move(costs));
}

void CreditLedger::append(LedgerEntry entry) {
  if (!std::isfinite(entry.amount)) throw UsageError("ledger amounts must be finite");
  if (entry.kind == LedgerKind::kAuctionDebit && entry.amount > 0.0) {
    throw UsageError("auction debits must be nonpositive");
  }
  if (!entries_.empty()) {
    const LedgerEntry& back = entries_.back();
    if (entry.round < back.round) throw UsageError("ledger entries must be appended in round order");
  }
  entries_.push_back(std::move(entry));
}

double CreditLedger::balance(const std::string& agent) const {
  double total = 0.0;
  for (const auto& e : entries_) {
    if (e.agent_id == agent) total += e.amount;
  }
  return total;
}

std::map<std::string, double> CreditLedger::balances() const {
  std::map<std::string, double> out;
  for (const auto& e : entries_) out[e.agent_id] += e.amount;
  return out;
}

ConferenceReport run_full_conference_round(const ConferenceInput& input,
                                           CreditLedger& ledger) {
  if (!input.prior) throw UsageError("conference round needs a prior");
  const CriteriaHierarchy& h = input.prior->hierarchy();
  const int T = h.criteria();
  input.hyperparameters.validate(T);
  input.profile.validate(h);
  for (const auto& c : input.costs) {
    if (c.max_level() != T) throw UsageError("cost functions need T + 1 entries");
  }
  std::map<std::string, const AuthorModel*> authors;
  for (const auto& a : input.authors) {
    a.validate();
    authors[a.author_id] = &a;
  }
  for (const auto& b : input.bids) {
    const auto it = authors.find(b.author_id);
    if (it == authors.end()) throw UsageError("bid for " + b.paper_id + " names unknown author " + b.author_id);
    if (!it->second->acceptance_prob.count(b.paper_id)) {
      throw UsageError("author " + b.author_id + " has no acceptance probability for " + b.paper_id);
    }
  }

  ConferenceReport report;
  report.round = input.round;
  if (input.planner) {
    SlotPlanInput plan_input = *input.planner;
    plan_input.bids = input.bids;
    report.plan = plan_slots(plan_input);
    report.slots = report.plan->chosen;
  } else if (input.fixed_slots) {
    report.slots = *input.fixed_slots;
  } else {
    throw UsageError("conference round needs a slot count or a slot planner");
  }

  if (report.slots > 0) {
    report.auction = run_vcg(input.bids, report.slots);
  } else {
    report.auction.losing_bids = rank_bids(input.bids);
  }
  report.revenue = report.auction.revenue;
  if (!input.planner && !report.auction.winners.empty() && input.reviewer_pool.size() < 3) {
    throw UsageError("reviewer pool needs at least three reviewers");
  }

  std::map<std::string, std::string> author_of;
  for (const auto& b : input.bids) author_of[b.paper_id] = b.author_id;

  const InducedJoint joint(input.prior, input.profile);
  const ForecastBook books = ForecastBook::honest(joint);
  const double price = report.auction.clearing_price;

  for (std::size_t i = 0; i < report.auction.winners.size(); ++i) {
    PaperRound paper;
    paper.paper_id = report.auction.winners[i];
    paper.author_id = author_of.at(paper.paper_id);
    ledger.append({input.round, paper.paper_id, paper.author_id, LedgerKind::kAuctionDebit, -price});

    for (std::size_t j = 0; j < 3; ++j) {
      if (input.planner) {
        const int r = report.plan->assignment.reviewers[i][j];
        paper.reviewers[j] = input.planner->quality.reviewers[static_cast<std::size_t>(r)];
      } else {
        paper.reviewers[j] = input.reviewer_pool[(3 * i + j) % input.reviewer_pool.size()];
      }
    }
    paper.review = run_review_round(joint, input.hyperparameters,
                                    Rng::derive(input.seed, 1000 + i), books);
    for (Reviewer k : kAllReviewers) {
      const auto ki = static_cast<std::size_t>(index_of(k));
      paper.payout[ki] = paper.review.payments[ki].total;
      report.total_payout += paper.payout[ki];
      ledger.append({input.round, paper.paper_id, paper.reviewers[ki], LedgerKind::kReviewCredit,
                     paper.payout[ki]});
      report.reviewer_utility[paper.reviewers[ki]] +=
          paper.payout[ki] - input.costs[ki].total(input.profile[k].effort);
    }

    const AuthorModel& author = *authors.at(paper.author_id);
    Rng acceptance(Rng::derive(input.seed, 2000 + i));
    paper.accepted = acceptance.uniform() < author.acceptance_prob.at(paper.paper_id);
    paper.author_utility = (paper.accepted ? author.value_per_acceptance : 0.0) - price;
    report.author_utility[paper.author_id] += paper.author_utility;
    report.papers.push_back(std::move(paper));
  }
  report.surplus = report.revenue - report.total_payout;
  return report;
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
  const Json j = parse_json(json_text, "scenario");
  if (!j.is_object()) throw UsageError("scenario must be a JSON object");
  ScenarioConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("hierarchy")) c.hierarchy = hierarchy_from_json(j.at("hierarchy"));

    const Json& prior = j.at("prior");
    if (prior.contains("file")) {
      c.prior_file = join_path(base_dir, prior.at("file").get<std::string>());
      c.hierarchy = prior_from_json(load_json(*c.prior_file)).hierarchy();
    } else {
      const Json& g = prior.at("generate");
      c.prior_seed = g.value("seed", c.seed);
      c.prior_options.support_floor = g.value("support_floor", c.prior_options.support_floor);
      c.prior_options.max_rejects = g.value("max_rejects", c.prior_options.max_rejects);
      c.prior_options.min_relevance_gap =
          g.value("min_relevance_gap", c.prior_options.min_relevance_gap);
      if (c.hierarchy.alphabet_sizes.empty()) throw UsageError("generated prior needs a hierarchy");
    }
    c.hierarchy.validate();

    c.costs = costs_from_json(j.at("costs"));

    if (j.contains("hyperparameters")) {
      const Json& hp = j.at("hyperparameters");
      if (hp.contains("file")) {
        c.hyperparameter_file = join_path(base_dir, hp.at("file").get<std::string>());
        c.hyperparameters = hyperparameters_from_json(load_json(*c.hyperparameter_file));
      } else if (hp.contains("solve")) {
        const Json& s = hp.at("solve");
        c.lp_options.epsilon = s.value("epsilon", c.lp_options.epsilon);
        c.lp_options.include_ir = s.value("ir", c.lp_options.include_ir);
        c.lp_options.cap = s.value("cap", c.lp_options.cap);
        c.lp_options.min_beta = s.value("min_beta", c.lp_options.min_beta);
      } else {
        c.hyperparameters = hyperparameters_from_json(hp);
      }
    }

    if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
    for (const auto& check : c.checks) {
      if (!kKnownChecks.count(check)) throw UsageError("unknown check '" + check + "'");
    }
    c.max_deviations = j.value("max_deviations", c.max_deviations);

    if (j.contains("conference")) {
      const Json& conf = j.at("conference");
      ConferenceInput in;
      in.round = conf.value("round", 1);
      in.bids = bids_from_json(conf.at("bids"));
      in.authors = authors_from_json(conf.at("authors"));
      in.seed = conf.value("seed", c.seed);
      in.profile = conf.contains("profile") ? profile_from_json(conf.at("profile"), c.hierarchy)
                                            : StrategyProfile::truthful_full_effort(c.hierarchy);
      if (conf.contains("slots")) in.fixed_slots = conf.at("slots").get<int>();
      if (conf.contains("planner")) {
        const Json& p = conf.at("planner");
        SlotPlanInput plan;
        plan.quality = match_quality_from_json(p.at("matches"));
        plan.expected_costs = matrix_from_json(p.at("expected_costs"), "expected_costs");
        plan.lambda = p.value("lambda", 0.0);
        plan.min_avg_score = p.value("min_avg_score", plan.min_avg_score);
        in.planner = std::move(plan);
      }
      if (conf.contains("reviewer_pool")) {
        in.reviewer_pool = conf.at("reviewer_pool").get<std::vector<std::string>>();
      }
      c.conference = std::move(in);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed scenario: ") + e.what());
  }
  return c;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  ScenarioResult result;
  Json report = Json::object();
  report["seed"] = config.seed;

  std::shared_ptr<const JointPrior> prior;
  try {
    if (config.prior_file) {
      prior = std::make_shared<const JointPrior>(prior_from_json(load_json(*config.prior_file)));
    } else {
      prior = std::make_shared<const JointPrior>(
          generate_random_prior(config.hierarchy, config.prior_seed, config.prior_options));
    }
  } catch (const ProbabilityError& e) {
    result.failures.push_back(std::string("prior: ") + e.what());
    report["failures"] = result.failures;
    result.report_json = report.dump(2) + "\n";
    result.exit_code = 1;
    return result;
  }
  const int T = prior->criteria();
  for (const auto& c : config.costs) {
    if (c.max_level() != T) throw UsageError("cost functions need T + 1 entries");
  }
  report["prior"] = to_json(*prior);
  report["assumptions"] = to_json(check_assumptions(*prior));

  Hyperparameters hp;
  if (config.hyperparameters) {
    hp = *config.hyperparameters;
    hp.validate(T);
    report["hyperparameters"] = to_json(hp);
  } else {
    try {
      const LpProblem problem = assemble_lp(prior, config.costs, config.lp_options);
      const LpSolution solution = solve_hyperparameters(problem);
      hp = solution.hyperparameters;
      report["lp"] = to_json(solution, problem);
      report["hyperparameters"] = to_json(hp);
    } catch (const UsageError& e) {
      result.failures.push_back(std::string("hyperparameters: ") + e.what());
      report["failures"] = result.failures;
      result.report_json = report.dump(2) + "\n";
      result.exit_code = 1;
      return result;
    }
  }

  const auto& checks = config.checks;
  std::ostringstream csv;
  csv << "reviewer,expected_expert,expected_target,expected_total,informative_utility,"
         "uninformative_utility,best_deviation_gap\n";
  std::optional<PropertyVerdict> verdict;
  std::optional<ExpectedPaymentReport> expected;
  const bool wants_verdict = contains(checks, "zero_payment") || contains(checks, "ir") ||
                             contains(checks, "dominance") || contains(checks, "strict_bne");
  Json check_json = Json::object();
  if (wants_verdict) {
    BestResponseOptions options;
    options.max_deviations = config.max_deviations;
    verdict = verify_equilibrium_properties(prior, hp, config.costs, options,
                                            contains(checks, "strict_bne"));
    report["verdict"] = to_json(*verdict);
    const std::array<std::pair<const char*, bool>, 4> flags = {{
        {"zero_payment", verdict->zero_payment_pass},
        {"ir", verdict->ir_pass},
        {"dominance", verdict->dominance_pass},
        {"strict_bne", verdict->strict_bne_pass},
    }};
    for (const auto& [name, pass] : flags) {
      if (!contains(checks, name)) continue;
      check_json[name] = pass;
      if (!pass) {
        std::string why = name;
        for (const auto& note : verdict->notes) why += "; " + note;
        result.failures.push_back(why);
      }
    }
  }
  {
    const InducedJoint truthful(prior, StrategyProfile::truthful_full_effort(prior->hierarchy()));
    expected = expected_payment_exact(truthful, hp);
    report["expected_payment"] = to_json(*expected);
    if (contains(checks, "closed_form")) {
      const bool pass = expected->closed_form_valid && expected->max_discrepancy <= kIdentityTolerance;
      check_json["closed_form"] = pass;
      if (!pass) result.failures.push_back("closed_form: enumerated payments disagree with the information-theoretic values");
    }
  }
  if (contains(checks, "marginal")) {
    Json marginals = Json::array();
    bool pass = true;
    for (Reviewer k : kAllReviewers) {
      for (int level = 1; level <= T; ++level) {
        const MarginalReport m = marginal_payments(
            prior, hp, k, level, &config.costs[static_cast<std::size_t>(index_of(k))]);
        marginals.push_back(to_json(m));
        if (m.max_discrepancy > 1e-9 || !(m.weighted_difference > m.marginal_cost)) pass = false;
      }
    }
    report["marginals"] = std::move(marginals);
    check_json["marginal"] = pass;
    if (!pass) result.failures.push_back("marginal: some effort step does not pay for itself");
  }
  report["checks"] = check_json;

  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    double e = 0.0, g = 0.0, total = 0.0;
    if (expected) {
      for (int t = 0; t < T; ++t) {
        e += (*expected)[k].expert[static_cast<std::size_t>(t)];
        g += (*expected)[k].target[static_cast<std::size_t>(t)];
      }
      total = (*expected)[k].total;
    }
    csv << reviewer_name(k) << ',' << csv_number(e) << ',' << csv_number(g) << ','
        << csv_number(total) << ','
        << csv_number(verdict ? verdict->informative_utility[ki] : 0.0) << ','
        << csv_number(verdict ? verdict->uninformative_utility[ki] : 0.0) << ','
        << csv_number(verdict && contains(checks, "strict_bne") ? verdict->best_responses[ki].gap
                                                                : 0.0)
        << '\n';
  }
  result.summary_csv = csv.str();

  if (config.conference) {
    ConferenceInput in = *config.conference;
    in.prior = prior;
    in.costs = config.costs;
    in.hyperparameters = hp;
    CreditLedger ledger;
    const ConferenceReport conf = run_full_conference_round(in, ledger);
    Json cj = to_json(conf);
    cj["ledger"] = to_json(ledger);
    report["conference"] = std::move(cj);
    std::ostringstream pc;
    pc << "paper_id,author_id,reviewer_A,reviewer_B,reviewer_C,payout_A,payout_B,payout_C,accepted,"
          "author_utility\n";
    for (const auto& p : conf.papers) {
      pc << p.paper_id << ',' << p.author_id << ',' << p.reviewers[0] << ',' << p.reviewers[1]
         << ',' << p.reviewers[2] << ',' << csv_number(p.payout[0]) << ','
         << csv_number(p.payout[1]) << ',' << csv_number(p.payout[2]) << ','
         << (p.accepted ? 1 : 0) << ',' << csv_number(p.author_utility) << '\n';
    }
    result.conference_csv = pc.str();
  }

  report["failures"] = result.failures;
  report["pass"] = result.failures.empty();
  result.exit_code = result.failures.empty() ? 0 : 1;
  result.report_json = report.dump(2) + "\n";
  return result;
}

}  // namespace hdipp
