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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hdipp/common.h"
#include "hdipp/probability.h"
#include "test_util.h"

namespace hdipp {
namespace {

using testing::oracle_marginal;
using testing::random_table;

TEST_CASE("entropy of reference distributions") {
  CHECK(entropy(Distribution::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(entropy(Distribution::point_mass(3, 1)) == 0.0);
  CHECK(entropy(Distribution({0.5, 0.5})) == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("kl divergence reference values and support errors") {
  const Distribution p({0.2, 0.3, 0.5});
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(Distribution({1.0, 0.0}), Distribution::uniform(2)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(kl_divergence(Distribution::uniform(2), Distribution({1.0, 0.0})), ProbabilityError);
  CHECK_THROWS_AS(kl_divergence(Distribution::uniform(2), Distribution::uniform(3)), UsageError);

  // Seeded pair against an elementwise sum.
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> a(6), b(6);
  for (auto& v : a) v = u(gen);
  for (auto& v : b) v = u(gen);
  const Distribution pa = Distribution::from_weights(a), pb = Distribution::from_weights(b);
  double oracle = 0.0;
  for (int i = 0; i < 6; ++i) oracle += pa[i] * std::log(pa[i] / pb[i]);
  CHECK(std::abs(kl_divergence(pa, pb) - oracle) <= 1e-12);
}

TEST_CASE("log score") {
  CHECK(log_score(2, Distribution::point_mass(3, 2)) == 0.0);
  CHECK(log_score(0, Distribution::uniform(4)) == doctest::Approx(-1.386294).epsilon(1e-6));
  CHECK_THROWS_AS(log_score(1, Distribution({1.0, 0.0})), ProbabilityError);
  CHECK_THROWS_AS(log_score(5, Distribution::uniform(2)), UsageError);
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(Distribution({1.0}), UsageError);
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), UsageError);
  CHECK_THROWS_AS(Distribution({NAN, 1.0}), UsageError);
  CHECK(Distribution({0.3, 0.4, 0.3}).mode() == 1);
  CHECK(Distribution({0.4, 0.2, 0.4}).mode() == 0);
}

TEST_CASE("forecast floor keeps log scores finite") {
  const Distribution floored = apply_forecast_floor(Distribution({1.0, 0.0, 0.0}));
  CHECK(floored[1] > 0.0);
  CHECK(std::isfinite(log_score(1, floored)));
  double total = 0.0;
  for (double v : floored.probabilities()) total += v;
  CHECK(std::abs(total - 1.0) <= kNormalizationTolerance);
}

TEST_CASE("marginal of a uniform 2x2 table") {
  const Table t({2, 2}, {0.25, 0.25, 0.25, 0.25});
  const Distribution d = marginal_distribution(t, 0);
  CHECK(d[0] == 0.5);
  CHECK(d[1] == 0.5);
  const std::vector<int> empty;
  CHECK_THROWS_AS(marginal(t, empty), UsageError);
}

TEST_CASE("keeping every axis copies the table") {
  std::vector<double> data(8, 0.03 / 7.0);
  data[5] = 0.97;
  const Table t({2, 2, 2}, data);
  const std::vector<int> all = {0, 1, 2};
  const Table m = marginal(t, all);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(m[i] - t[i]) <= 1e-15);
}

TEST_CASE("marginal matches brute-force summation") {
  const auto prior = testing::unstructured_prior(testing::hierarchy({2, 2}), 3);
  const int axis = prior->axis(Reviewer::kB, 1);
  const Distribution d = marginal_distribution(prior->table(), axis);
  const auto oracle = oracle_marginal(prior->table(), {axis});
  for (int v = 0; v < 2; ++v) CHECK(std::abs(d[v] - oracle.at({v})) <= 1e-12);

  // Multi-axis keep, in a non-sorted order.
  const std::vector<int> keep = {4, 1};
  const Table m = marginal(prior->table(), keep);
  const auto o2 = oracle_marginal(prior->table(), keep);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::vector<int> idx = {a, b};
      CHECK(std::abs(m[m.flat_index(idx)] - o2.at({a, b})) <= 1e-12);
    }
  }
}

TEST_CASE("conditional on an independent table is the marginal") {
  const std::vector<double> px = {0.2, 0.8}, py = {0.1, 0.6, 0.3};
  std::vector<double> data;
  for (double a : px) {
    for (double b : py) data.push_back(a * b);
  }
  const Table t({2, 3}, data);
  for (int x = 0; x < 2; ++x) {
    const std::vector<AxisValue> given = {{0, x}};
    const Distribution d = conditional(t, 1, given);
    for (int y = 0; y < 3; ++y) CHECK(std::abs(d[y] - py[static_cast<std::size_t>(y)]) <= 1e-15);
  }
}

TEST_CASE("conditional on a smoothed copy concentrates on the copied value") {
  const double eps = 1e-6;
  const Table t({2, 2}, {0.5 * (1 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1 - eps)});
  for (int x = 0; x < 2; ++x) {
    const std::vector<AxisValue> given = {{0, x}};
    CHECK(conditional(t, 1, given)[x] == doctest::Approx(1 - eps).epsilon(1e-12));
  }
}

TEST_CASE("conditional equals the ratio of brute-force marginals") {
  const Table t = random_table({2, 3, 2, 2}, 17);
  const auto joint = oracle_marginal(t, {1, 0, 3});
  const auto given = oracle_marginal(t, {0, 3});
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      const std::vector<AxisValue> g = {{0, a}, {3, c}};
      const Distribution d = conditional(t, 1, g);
      for (int y = 0; y < 3; ++y) {
        CHECK(std::abs(d[y] - joint.at({y, a, c}) / given.at({a, c})) <= 1e-12);
      }
    }
  }
  const Table zero({2, 2}, {0.5, 0.5, 0.0, 0.0});
  const std::vector<AxisValue> impossible = {{0, 1}};
  CHECK_THROWS_AS(conditional(zero, 1, impossible), ProbabilityError);
}

TEST_CASE("conditional mutual information reference cases") {
  // X independent of Y given Z.
  std::vector<double> data;
  const double pz[2] = {0.3, 0.7};
  const double px_z[2][2] = {{0.2, 0.8}, {0.6, 0.4}};
  const double py_z[2][3] = {{0.1, 0.2, 0.7}, {0.5, 0.25, 0.25}};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 3; ++y) {
      for (int z = 0; z < 2; ++z) data.push_back(pz[z] * px_z[z][x] * py_z[z][y]);
    }
  }
  const Table ci({2, 3, 2}, data);
  const std::vector<int> x = {0}, y = {1}, z = {2}, none;
  CHECK(conditional_mutual_information(ci, x, y, z) <= 1e-15);

  const Table copy({2, 2}, {0.5, 0.0, 0.0, 0.5});
  CHECK(conditional_mutual_information(copy, x, y, none) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const std::vector<int> overlap = {0, 1};
  CHECK_THROWS_AS(conditional_mutual_information(ci, x, overlap, z), UsageError);
}

TEST_CASE("conditional mutual information equals expected log-score gain") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Table t = random_table({2, 3, 2, 3}, seed);
    const std::vector<int> x = {0, 3}, y = {1}, z = {2};
    const double oracle = testing::oracle_log_score_gain(t, x, y, z);
    CHECK(std::abs(conditional_mutual_information(t, x, y, z) - oracle) <= 1e-12);
    CHECK(std::abs(conditional_mutual_information(t, y, x, z) - oracle) <= 1e-12);
  }
}

TEST_CASE("conditional entropy is joint minus conditioning entropy") {
  const Table t = random_table({3, 2, 2}, 8);
  const std::vector<int> x = {0}, z = {1, 2};
  auto h = [](const std::map<std::vector<int>, double>& m) {
    double s = 0.0;
    for (const auto& [k, p] : m) s -= p * std::log(p);
    return s;
  };
  const double oracle = h(oracle_marginal(t, {0, 1, 2})) - h(oracle_marginal(t, {1, 2}));
  CHECK(std::abs(conditional_entropy(t, x, z) - oracle) <= 1e-12);
}

// Joint of (X, theta(Y), Z) for a row-stochastic garbling theta of Y.
Table garble(const Table& t, const std::vector<std::vector<double>>& theta) {
  const int dx = t.shape()[0], dy = t.shape()[1], dz = t.shape()[2];
  const int dout = static_cast<int>(theta[0].size());
  Table out = Table::zeros({dx, dout, dz});
  for (int a = 0; a < dx; ++a) {
    for (int b = 0; b < dy; ++b) {
      for (int c = 0; c < dz; ++c) {
        const std::vector<int> in = {a, b, c};
        for (int o = 0; o < dout; ++o) {
          const std::vector<int> idx = {a, o, c};
          out[out.flat_index(idx)] += t[t.flat_index(in)] * theta[static_cast<std::size_t>(b)][static_cast<std::size_t>(o)];
        }
      }
    }
  }
  return out;
}

TEST_CASE("garbling never increases conditional mutual information") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<int> x = {0}, y = {1}, z = {2};
  for (int trial = 0; trial < 100; ++trial) {
    const Table t = random_table({3, 3, 2}, 1000 + static_cast<std::uint64_t>(trial));
    std::vector<std::vector<double>> theta(3, std::vector<double>(3));
    for (auto& row : theta) {
      double s = 0.0;
      for (double& v : row) s += (v = u(gen));
      for (double& v : row) v /= s;
    }
    CHECK(conditional_mutual_information(garble(t, theta), x, y, z) <=
          conditional_mutual_information(t, x, y, z) + 1e-12);
  }
}

TEST_CASE("merging two relevant signal values strictly loses information") {
  const std::vector<int> x = {0}, y = {1}, z = {2};
  const std::vector<std::vector<double>> merge = {{1, 0}, {1, 0}, {0, 1}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Table t = random_table({3, 3, 2}, seed);
    CHECK(conditional_mutual_information(garble(t, merge), x, y, z) <
          conditional_mutual_information(t, x, y, z) - 1e-9);
  }
}

TEST_CASE("log score is proper on a dense forecast grid") {
  const Distribution d({0.15, 0.35, 0.5});
  auto expected = [&](const Distribution& f) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += d[i] * log_score(i, f);
    return s;
  };
  const double truth = expected(d);
  for (int a = 1; a < 100; ++a) {
    for (int b = 1; a + b < 100; ++b) {
      const Distribution f({a / 100.0, b / 100.0, (100 - a - b) / 100.0});
      CHECK(expected(f) <= truth + 1e-15);
    }
  }
}

TEST_CASE("assumption check flags independence and missing support") {
  const CriteriaHierarchy h = testing::hierarchy({2});
  // Independent reviewers: every belief about a peer ignores one's own signal.
  const std::vector<double> pa = {0.3, 0.7}, pb = {0.6, 0.4}, pc = {0.45, 0.55};
  std::vector<double> data;
  for (double a : pa) {
    for (double b : pb) {
      for (double c : pc) data.push_back(a * b * c);
    }
  }
  const JointPrior independent(h, Table({2, 2, 2}, data));
  const AssumptionReport r = check_assumptions(independent);
  CHECK(r.full_support);
  CHECK(r.max_conditional_independence_violation <= 1e-15);
  CHECK_FALSE(r.stochastic_relevance);

  std::vector<double> holes = {0.0, 0.2, 0.1, 0.1, 0.2, 0.1, 0.2, 0.1};
  const JointPrior sparse(h, Table({2, 2, 2}, holes));
  CHECK_FALSE(check_assumptions(sparse).full_support);
  CHECK(sparse.min_entry() == 0.0);
}

TEST_CASE("unstructured priors violate the independence structure") {
  const auto prior = testing::unstructured_prior(testing::hierarchy({2, 2}), 5);
  const AssumptionReport r = check_assumptions(*prior);
  CHECK(r.max_conditional_independence_violation > 1e-6);
  CHECK_FALSE(r.conditional_independence);
}

TEST_CASE("prior validation") {
  const CriteriaHierarchy h = testing::hierarchy({2});
  CHECK_THROWS_AS(JointPrior(h, Table({2, 2, 2}, std::vector<double>(8, 0.2))), UsageError);
  CHECK_THROWS_AS(JointPrior(h, Table({2, 2}, std::vector<double>(4, 0.25))), UsageError);
  CHECK_THROWS_AS(testing::hierarchy({1}).validate(), UsageError);
}

}  // namespace
}  // namespace hdipp
