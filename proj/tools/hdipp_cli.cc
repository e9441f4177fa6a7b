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

// Command-line front end. Exit codes: 0 pass, 1 a requested property check
// failed, 2 bad usage or input.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hdipp/auction.h"
#include "hdipp/common.h"
#include "hdipp/equilibrium.h"
#include "hdipp/harness.h"
#include "hdipp/io.h"
#include "hdipp/lp.h"
#include "hdipp/mechanism.h"
#include "hdipp/probability.h"
#include "hdipp/reviewers.h"
#include "hdipp/rng.h"
#include "hdipp/slots.h"

namespace {

using namespace hdipp;

constexpr int kPass = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsage = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir;
};

std::string output_dir(const Globals& g) {
  if (const char* env = std::getenv("HDIPP_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return g.out_dir.empty() ? "." : g.out_dir;
}

// Writes to --out (relative to the output directory) or stdout.
void emit(const Globals& g, const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path p(out);
  if (p.is_relative()) p = std::filesystem::path(output_dir(g)) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_text_file(p.string(), text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::shared_ptr<const JointPrior> load_prior(const std::string& path) {
  return std::make_shared<const JointPrior>(prior_from_json(load_json(path)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer-review credit mechanism: auction, review payments and equilibrium checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");

  int exit_code = kPass;

  // prior gen
  auto* prior_cmd = app.add_subcommand("prior", "Prior utilities");
  prior_cmd->require_subcommand(1);
  auto* gen = prior_cmd->add_subcommand("gen", "Generate a random prior satisfying the assumptions");
  std::vector<int> alphabet;
  PriorGenOptions gen_opts;
  std::string gen_out;
  gen->add_option("--alphabet", alphabet, "Alphabet size per criterion")->required()->delimiter(',');
  gen->add_option("--support-floor", gen_opts.support_floor, "Minimum tensor entry");
  gen->add_option("--max-rejects", gen_opts.max_rejects, "Draws before giving up");
  gen->add_option("--min-gap", gen_opts.min_relevance_gap, "Required relevance margin");
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->callback([&] {
    CriteriaHierarchy h;
    h.alphabet_sizes = alphabet;
    const JointPrior prior = generate_random_prior(h, g.seed, gen_opts);
    emit(g, gen_out, dump(to_json(prior)));
    std::cerr << to_json(check_assumptions(prior)).dump() << "\n";
  });

  // auction run
  auto* auction_cmd = app.add_subcommand("auction", "Stage-one slot auction");
  auction_cmd->require_subcommand(1);
  auto* auction_run = auction_cmd->add_subcommand("run", "Run the uniform-price auction");
  std::string bids_file, authors_file, auction_out;
  int slots = 0;
  double resolution = 0.01;
  auction_run->add_option("--bids", bids_file, "Bids JSON")->required();
  auction_run->add_option("--slots", slots, "Number of slots")->required();
  auction_run->add_option("--authors", authors_file, "Author models; enables the truthfulness grid");
  auction_run->add_option("--resolution", resolution, "Bid grid resolution");
  auction_run->add_option("--out", auction_out, "Output file");
  auction_run->callback([&] {
    const std::vector<Bid> bids = bids_from_json(load_json(bids_file));
    Json j;
    j["outcome"] = to_json(run_vcg(bids, slots));
    if (!authors_file.empty()) {
      const auto authors = authors_from_json(load_json(authors_file));
      const TruthfulnessReport r = verify_bid_truthfulness(authors, slots, resolution);
      j["truthfulness"] = to_json(r);
      if (r.max_violation > 1e-12) exit_code = kPropertyFailure;
    }
    emit(g, auction_out, dump(j));
  });

  // review simulate
  auto* review_cmd = app.add_subcommand("review", "Stage-two review rounds");
  review_cmd->require_subcommand(1);
  auto* simulate = review_cmd->add_subcommand("simulate", "Simulate seeded review rounds");
  std::string prior_file, hp_file, profile_file, review_out;
  int rounds = 1;
  simulate->add_option("--prior", prior_file, "Prior JSON")->required();
  simulate->add_option("--hyperparams", hp_file, "Hyperparameters JSON")->required();
  simulate->add_option("--profile", profile_file, "Strategy profile JSON (default truthful, full effort)");
  simulate->add_option("--rounds", rounds, "Number of rounds")->check(CLI::PositiveNumber);
  simulate->add_option("--out", review_out, "Output file");
  simulate->callback([&] {
    const auto prior = load_prior(prior_file);
    const Hyperparameters hp = hyperparameters_from_json(load_json(hp_file));
    const StrategyProfile profile =
        profile_file.empty() ? StrategyProfile::truthful_full_effort(prior->hierarchy())
                             : profile_from_json(load_json(profile_file), prior->hierarchy());
    const InducedJoint joint(prior, profile);
    const ForecastBook books = ForecastBook::honest(joint);
    Json list = Json::array();
    std::array<double, 3> sums{};
    for (int i = 0; i < rounds; ++i) {
      const RoundResult r = run_review_round(joint, hp, Rng::derive(g.seed, static_cast<std::uint64_t>(i)), books);
      for (std::size_t k = 0; k < 3; ++k) sums[k] += r.payments[k].total;
      list.push_back(to_json(r));
    }
    Json mean = Json::object();
    for (Reviewer k : kAllReviewers) {
      mean[std::string(reviewer_name(k))] = sums[static_cast<std::size_t>(index_of(k))] / rounds;
    }
    emit(g, review_out, dump({{"profile", to_json(profile)}, {"rounds", std::move(list)},
                              {"mean_payment", std::move(mean)}}));
  });

  // equilibrium check
  auto* eq_cmd = app.add_subcommand("equilibrium", "Equilibrium verification");
  eq_cmd->require_subcommand(1);
  auto* check = eq_cmd->add_subcommand("check", "Check the equilibrium properties exhaustively");
  std::string eq_prior, eq_hp, eq_costs, eq_out;
  std::size_t max_deviations = kDefaultEnumerationBudget;
  check->add_option("--prior", eq_prior, "Prior JSON")->required();
  check->add_option("--hyperparams", eq_hp, "Hyperparameters JSON")->required();
  check->add_option("--costs", eq_costs, "Effort costs JSON")->required();
  check->add_option("--max-deviations", max_deviations, "Enumeration budget per reviewer");
  check->add_option("--out", eq_out, "Output file");
  check->callback([&] {
    const auto prior = load_prior(eq_prior);
    const Hyperparameters hp = hyperparameters_from_json(load_json(eq_hp));
    const auto costs = costs_from_json(load_json(eq_costs));
    BestResponseOptions options;
    options.max_deviations = max_deviations;
    const PropertyVerdict v = verify_equilibrium_properties(prior, hp, costs, options);
    emit(g, eq_out, dump(to_json(v)));
    if (!v.all_pass()) exit_code = kPropertyFailure;
  });

  // hyperparams solve
  auto* hp_cmd = app.add_subcommand("hyperparams", "Hyperparameter tuning");
  hp_cmd->require_subcommand(1);
  auto* solve = hp_cmd->add_subcommand("solve", "Solve the hyperparameter linear program");
  std::string lp_prior, lp_costs, lp_out;
  LpOptions lp_opts;
  solve->add_option("--prior", lp_prior, "Prior JSON")->required();
  solve->add_option("--costs", lp_costs, "Effort costs JSON")->required();
  solve->add_option("--epsilon", lp_opts.epsilon, "Strictness margin");
  solve->add_flag("--ir", lp_opts.include_ir, "Add participation constraints");
  solve->add_option("--cap", lp_opts.cap, "Upper bound on every weight");
  solve->add_option("--min-beta", lp_opts.min_beta, "Lower bound on target weights");
  solve->add_option("--out", lp_out, "Output file");
  solve->callback([&] {
    const auto prior = load_prior(lp_prior);
    const auto costs = costs_from_json(load_json(lp_costs));
    const LpProblem problem = assemble_lp(prior, costs, lp_opts);
    const LpSolution solution = solve_hyperparameters(problem);
    emit(g, lp_out, dump(to_json(solution, problem)));
  });

  // slots plan
  auto* slots_cmd = app.add_subcommand("slots", "Slot planning");
  slots_cmd->require_subcommand(1);
  auto* plan_cmd = slots_cmd->add_subcommand("plan", "Choose the number of review slots");
  std::string plan_bids, plan_matches, plan_costs, plan_out;
  SlotPlanInput plan_input;
  plan_cmd->add_option("--bids", plan_bids, "Bids JSON")->required();
  plan_cmd->add_option("--matches", plan_matches, "Match-quality JSON")->required();
  plan_cmd->add_option("--costs", plan_costs, "Expected payout matrix JSON")->required();
  plan_cmd->add_option("--lambda", plan_input.lambda, "Volume weight");
  plan_cmd->add_option("--min-avg-score", plan_input.min_avg_score, "Acceptable mean match score");
  plan_cmd->add_option("--out", plan_out, "Output file");
  plan_cmd->callback([&] {
    plan_input.bids = bids_from_json(load_json(plan_bids));
    plan_input.quality = match_quality_from_json(load_json(plan_matches));
    plan_input.expected_costs = matrix_from_json(load_json(plan_costs), "expected costs");
    const SlotPlan plan = plan_slots(plan_input);
    emit(g, plan_out, dump(to_json(plan, plan_input.quality)));
  });

  // conference run
  auto* conf_cmd = app.add_subcommand("conference", "End-to-end scenarios");
  conf_cmd->require_subcommand(1);
  auto* conf_run = conf_cmd->add_subcommand("run", "Run a JSON-configured scenario");
  std::string config_file;
  conf_run->add_option("--config", config_file, "Scenario JSON")->required();
  conf_run->callback([&] {
    const std::string base = std::filesystem::path(config_file).parent_path().string();
    Json raw = load_json(config_file);
    // --seed replaces the scenario's master seed before anything derives from it.
    if (app.get_option("--seed")->count() > 0 && raw.is_object()) raw["seed"] = g.seed;
    const ScenarioConfig config = parse_scenario(raw.dump(), base.empty() ? "." : base);
    const ScenarioResult r = run_scenario(config);
    emit(g, "report.json", r.report_json);
    emit(g, "summary.csv", r.summary_csv);
    if (!r.conference_csv.empty()) emit(g, "conference.csv", r.conference_csv);
    for (const auto& f : r.failures) std::cerr << "FAIL " << f << "\n";
    exit_code = r.exit_code;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ProbabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return exit_code;
}
