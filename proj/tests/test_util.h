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

// Shared fixtures and brute-force oracles. Nothing here calls the library's
// own information-theoretic routines, so tests comparing against these
// helpers are independent checks.

#ifndef HDIPP_TESTS_TEST_UTIL_H_
#define HDIPP_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "hdipp/probability.h"

namespace hdipp::testing {

// Dense full-support table with entries drawn from U(0.05, 1), normalized.
inline Table random_table(const std::vector<int>& shape, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  std::vector<double> data(n);
  double total = 0.0;
  for (double& v : data) total += (v = u(gen));
  for (double& v : data) v /= total;
  return Table(shape, std::move(data));
}

inline CriteriaHierarchy hierarchy(std::vector<int> sizes) {
  CriteriaHierarchy h;
  h.alphabet_sizes = std::move(sizes);
  return h;
}

inline std::vector<int> prior_shape(const CriteriaHierarchy& h) {
  std::vector<int> shape;
  for (int r = 0; r < 3; ++r) {
    for (int d : h.alphabet_sizes) shape.push_back(d);
  }
  return shape;
}

// Unstructured random prior: full support, generally violates the
// independence structure the mechanism assumes.
inline std::shared_ptr<const JointPrior> unstructured_prior(const CriteriaHierarchy& h,
                                                           std::uint64_t seed) {
  return std::make_shared<const JointPrior>(h, random_table(prior_shape(h), seed));
}

// Visits every cell with its full assignment.
inline void for_each_cell(const Table& t, const std::function<void(const std::vector<int>&, double)>& f) {
  std::vector<int> x(t.shape().size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Row-major decode, last axis fastest.
    std::size_t rest = i;
    for (std::size_t a = x.size(); a-- > 0;) {
      const auto d = static_cast<std::size_t>(t.shape()[a]);
      x[a] = static_cast<int>(rest % d);
      rest /= d;
    }
    f(x, t[i]);
  }
}

// Projection of an assignment onto a list of axes, used as a map key.
inline std::vector<int> project(const std::vector<int>& x, const std::vector<int>& axes) {
  std::vector<int> out;
  for (int a : axes) out.push_back(x[static_cast<std::size_t>(a)]);
  return out;
}

// Probability of every joint value of `axes`, by summation over all cells.
inline std::map<std::vector<int>, double> oracle_marginal(const Table& t, const std::vector<int>& axes) {
  std::map<std::vector<int>, double> m;
  for_each_cell(t, [&](const std::vector<int>& x, double p) { m[project(x, axes)] += p; });
  return m;
}

inline std::vector<int> join(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// I(X; Y | Z) as the expected log-score gain of forecasting Y from (X, Z)
// over forecasting it from Z alone, computed cell by cell.
inline double oracle_log_score_gain(const Table& t, const std::vector<int>& x,
                                    const std::vector<int>& y, const std::vector<int>& z) {
  const auto pxyz = oracle_marginal(t, join(join(x, y), z));
  const auto pxz = oracle_marginal(t, join(x, z));
  const auto pyz = oracle_marginal(t, join(y, z));
  const auto pz = oracle_marginal(t, z);
  double total = 0.0;
  for (const auto& [key, p] : pxyz) {
    if (p <= 0.0) continue;
    const std::vector<int> kx(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(x.size()));
    const std::vector<int> ky(key.begin() + static_cast<std::ptrdiff_t>(x.size()),
                              key.begin() + static_cast<std::ptrdiff_t>(x.size() + y.size()));
    const std::vector<int> kz(key.begin() + static_cast<std::ptrdiff_t>(x.size() + y.size()), key.end());
    const double with_x = p / pxz.at(join(kx, kz));
    const double without_x = pyz.at(join(ky, kz)) / pz.at(kz);
    total += p * (std::log(with_x) - std::log(without_x));
  }
  return total;
}

}  // namespace hdipp::testing

#endif  // HDIPP_TESTS_TEST_UTIL_H_
