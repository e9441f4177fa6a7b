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
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "hdipp/equilibrium.h"
#include "hdipp/harness.h"
#include "hdipp/lp.h"
#include "mechanism_oracle.h"
#include "test_util.h"

namespace hdipp {
namespace {

using testing::hierarchy;

// Solve a small dense system by Gaussian elimination; nullopt if singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Optimum of a bounded LP by trying every vertex: each choice of n tight
// constraints among rows and bounds.
std::optional<double> vertex_oracle(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  std::vector<std::vector<double>> rows = lp.rows;
  std::vector<double> rhs = lp.rhs;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(lp.lower[j]);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(-lp.upper[j]);
  }
  const std::size_t m = rows.size();
  std::optional<double> best;
  std::vector<int> pick(m, 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(n), pick.end(), 1);
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < m; ++i) {
      if (pick[i]) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
    }
    const auto x = solve_square(a, b);
    if (!x) continue;
    bool feasible = true;
    for (std::size_t i = 0; i < m && feasible; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += rows[i][j] * (*x)[j];
      feasible = s >= rhs[i] - 1e-9;
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * (*x)[j];
    if (!best || obj < *best) best = obj;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

TEST_CASE("simplex solves a textbook program") {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.rows = {{1.0, 2.0}, {3.0, 1.0}};
  lp.rhs = {4.0, 6.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {10.0, 10.0};
  const SimplexResult r = solve_simplex(lp);
  REQUIRE(r.status == SimplexResult::Status::kOptimal);
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
  CHECK(r.objective == doctest::Approx(2.8));
  CHECK(std::abs(r.dual_objective - r.objective) <= 1e-9);
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  LinearProgram infeasible;
  infeasible.objective = {1.0};
  infeasible.rows = {{1.0}};
  infeasible.rhs = {2.0};
  infeasible.lower = {0.0};
  infeasible.upper = {1.0};
  CHECK(solve_simplex(infeasible).status == SimplexResult::Status::kInfeasible);

  LinearProgram unbounded;
  unbounded.objective = {-1.0};
  unbounded.rows = {{1.0}};
  unbounded.rhs = {1.0};
  unbounded.lower = {0.0};
  unbounded.upper = {std::numeric_limits<double>::infinity()};
  CHECK(solve_simplex(unbounded).status == SimplexResult::Status::kUnbounded);

  LinearProgram bad = infeasible;
  bad.rows = {{1.0, 2.0}};
  CHECK_THROWS_AS(solve_simplex(bad), UsageError);
}

TEST_CASE("simplex agrees with vertex enumeration on random programs") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), pos(0.0, 3.0);
  int optimal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2), m = 2 + static_cast<std::size_t>(trial % 3);
    LinearProgram lp;
    for (std::size_t j = 0; j < n; ++j) {
      lp.objective.push_back(coef(gen));
      lp.lower.push_back(trial % 4 == 0 ? pos(gen) * 0.3 : 0.0);
      lp.upper.push_back(lp.lower.back() + 1.0 + pos(gen));
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row;
      for (std::size_t j = 0; j < n; ++j) row.push_back(coef(gen));
      lp.rows.push_back(row);
      lp.rhs.push_back(coef(gen));
    }
    const SimplexResult r = solve_simplex(lp);
    const auto want = vertex_oracle(lp);
    if (!want) {
      CHECK(r.status == SimplexResult::Status::kInfeasible);
      continue;
    }
    ++optimal;
    REQUIRE(r.status == SimplexResult::Status::kOptimal);
    CHECK(std::abs(r.objective - *want) <= 1e-8);
    CHECK(std::abs(r.dual_objective - r.objective) <= 1e-8);
  }
  CHECK(optimal > 20);
}

std::array<EffortCost, 3> costs_for(int T, std::uint64_t seed, double scale) {
  return {generate_increasing_costs(T, seed, scale), generate_increasing_costs(T, seed + 1, scale),
          generate_increasing_costs(T, seed + 2, scale)};
}

TEST_CASE("program coefficients match a brute-force oracle") {
  const auto prior = testing::unstructured_prior(hierarchy({2, 2}), 5);
  const auto costs = costs_for(2, 3, 0.01);
  const LpProblem p = assemble_lp(prior, costs);
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    for (int level = 0; level <= 2; ++level) {
      auto o = testing::OracleProfile::truthful(prior->hierarchy());
      o.effort[ki] = level;
      const auto want = testing::oracle_expected_components(*prior, o);
      for (std::size_t t = 0; t < 2; ++t) {
        CHECK(std::abs(p.expert_payment[ki][static_cast<std::size_t>(level)][t] - want.expert[ki][t]) <= 1e-10);
        CHECK(std::abs(p.target_payment[ki][static_cast<std::size_t>(level)][t] - want.target[ki][t]) <= 1e-10);
      }
    }
  }
  CHECK(p.program.rows.size() == 6);
  CHECK(p.variable_labels[LpProblem::beta_index(Reviewer::kB, 1, 2)] == "beta_B^2");
}

TEST_CASE("solved weights satisfy every incentive constraint when replayed") {
  const auto prior = std::make_shared<const JointPrior>(generate_random_prior(hierarchy({2, 3}), 17));
  const auto costs = costs_for(2, 8, 0.02);
  for (bool ir : {false, true}) {
    LpOptions opts;
    opts.include_ir = ir;
    const LpProblem p = assemble_lp(prior, costs, opts);
    const LpSolution sol = solve_hyperparameters(p);
    CHECK(sol.duality_gap <= 1e-7);
    for (double s : sol.slacks) CHECK(s >= -1e-9);
    for (Reviewer k : kAllReviewers) {
      const auto ki = static_cast<std::size_t>(index_of(k));
      std::vector<double> utility;
      for (int level = 0; level <= 2; ++level) {
        StrategyProfile s = StrategyProfile::truthful_full_effort(prior->hierarchy());
        s[k].effort = level;
        const ExpectedPaymentReport r = expected_payment_exact(InducedJoint(prior, s), sol.hyperparameters);
        utility.push_back(r[k].total - costs[ki].total(level));
      }
      CHECK(utility[1] - utility[0] >= opts.epsilon - 1e-7);
      CHECK(utility[2] - utility[1] >= opts.epsilon - 1e-7);
      if (ir) CHECK(utility[2] == doctest::Approx(opts.epsilon).epsilon(1e-6));
      for (int t = 0; t < 2; ++t) CHECK(sol.hyperparameters.b(k, t) >= opts.min_beta - 1e-12);
    }
    if (!ir) {
      // Nothing but the cap stops the expert weights from growing.
      CHECK_FALSE(sol.binding_caps.empty());
      for (const auto& c : sol.binding_caps) CHECK(c.rfind("alpha", 0) == 0);
    }
  }
}

TEST_CASE("small-cap program matches a weight grid search") {
  const auto prior = std::make_shared<const JointPrior>(generate_random_prior(hierarchy({3}), 23));
  const auto costs = costs_for(1, 60, 0.01);
  LpOptions opts;
  opts.include_ir = true;
  opts.cap = 5.0;
  const LpProblem p = assemble_lp(prior, costs, opts);
  const LpSolution sol = solve_hyperparameters(p);
  // The program separates by reviewer; grid each (alpha, beta) plane.
  double grid_total = 0.0;
  const double step = 0.005;
  for (Reviewer k : kAllReviewers) {
    const auto ki = static_cast<std::size_t>(index_of(k));
    const double e1 = p.expert_payment[ki][1][0], e0 = p.expert_payment[ki][0][0];
    const double g1 = p.target_payment[ki][1][0], g0 = p.target_payment[ki][0][0];
    const double c = costs[ki].total(1);
    double best = std::numeric_limits<double>::infinity();
    for (double a = 0.0; a <= opts.cap + 1e-12; a += step) {
      for (double b = opts.min_beta; b <= opts.cap + 1e-12; b += step) {
        const double marginal = a * (e1 - e0) + b * (g1 - g0);
        const double payment = a * e1 + b * g1;
        if (marginal < c + opts.epsilon || payment < c + opts.epsilon) continue;
        best = std::min(best, payment);
      }
    }
    REQUIRE(std::isfinite(best));
    grid_total += best;
  }
  CHECK(sol.objective <= grid_total + 1e-9);
  CHECK(sol.objective >= grid_total - 0.05);
}

TEST_CASE("program input errors") {
  const auto prior = std::make_shared<const JointPrior>(generate_random_prior(hierarchy({2, 2}), 1));
  CHECK_THROWS_AS(assemble_lp(prior, costs_for(1, 1, 1.0)), UsageError);
  LpOptions bad;
  bad.min_beta = 2.0;
  bad.cap = 1.0;
  CHECK_THROWS_AS(assemble_lp(prior, costs_for(2, 1, 1.0), bad), UsageError);
}

}  // namespace
}  // namespace hdipp
