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

// Exact discrete probability machinery over small dense tensors. All
// information quantities are in nats.

#ifndef HDIPP_PROBABILITY_H_
#define HDIPP_PROBABILITY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hdipp/common.h"

namespace hdipp {

// Forecasts built from strategy inputs are clamped to at least this value
// and renormalized before scoring.
inline constexpr double kForecastFloor = 1e-9;

// A probability vector over {0, ..., size-1}.
class Distribution {
 public:
  Distribution() = default;
  // Throws UsageError unless entries are finite, nonnegative, at least two,
  // and sum to one within kNormalizationTolerance.
  explicit Distribution(std::vector<double> probabilities);

  static Distribution uniform(int size);
  static Distribution point_mass(int size, int value);
  // Normalizes nonnegative weights; throws ProbabilityError on zero mass.
  static Distribution from_weights(std::vector<double> weights);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
  std::span<const double> probabilities() const { return p_; }

  // Index of the largest entry; lowest index wins ties.
  int mode() const;

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> p_;
};

// Dense row-major tensor of nonnegative reals. The last axis varies fastest.
class Table {
 public:
  Table() = default;
  Table(std::vector<int> shape, std::vector<double> data);
  static Table zeros(std::vector<int> shape);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }
  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  std::size_t flat_index(std::span<const int> assignment) const;
  void unravel(std::size_t flat, std::span<int> assignment) const;
  double sum() const;

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
};

// Number of cells of a row-major tensor with the given axis sizes.
std::size_t cell_count(std::span<const int> shape);

struct AxisValue {
  int axis;
  int value;
};

// Sums out every axis not in `keep`; result axes follow the order of `keep`
// and are normalized to total mass one. Throws UsageError on an empty or
// repeated keep set.
Table marginal(const Table& joint, std::span<const int> keep);
Distribution marginal_distribution(const Table& joint, int axis);

// Bayes posterior of `target` given a partial assignment of other axes.
Distribution conditional(const Table& joint, int target,
                         std::span<const AxisValue> given);

double entropy(const Distribution& d);
double kl_divergence(const Distribution& p, const Distribution& q);

// H(X | Z) for disjoint axis sets.
double conditional_entropy(const Table& joint, std::span<const int> x,
                           std::span<const int> z);

// I(X; Y | Z) for pairwise-disjoint axis sets. Empty X or Y yields zero.
double conditional_mutual_information(const Table& joint,
                                      std::span<const int> x,
                                      std::span<const int> y,
                                      std::span<const int> z);

// ln forecast(outcome). Throws ProbabilityError when the forecast puts zero
// mass on the outcome.
double log_score(int outcome, const Distribution& forecast);

// Clamps every entry to at least `floor` and renormalizes. A forecast that is
// already at or above the floor everywhere is returned unchanged.
Distribution apply_forecast_floor(const Distribution& forecast,
                                  double floor = kForecastFloor);

// Totally ordered review criteria, each answered on its own finite scale.
struct CriteriaHierarchy {
  std::vector<int> alphabet_sizes;
  std::vector<std::string> labels;

  int criteria() const { return static_cast<int>(alphabet_sizes.size()); }
  int alphabet(int t) const { return alphabet_sizes[static_cast<std::size_t>(t)]; }
  // Number of distinct signal vectors a single reviewer can hold.
  std::size_t own_cells() const;
  void validate() const;
};

// Common prior over the three reviewers' signals. Axes are ordered
// (A criteria ascending, B criteria ascending, C criteria ascending).
class JointPrior {
 public:
  JointPrior(CriteriaHierarchy hierarchy, Table table);

  const CriteriaHierarchy& hierarchy() const { return hierarchy_; }
  const Table& table() const { return table_; }
  int criteria() const { return hierarchy_.criteria(); }
  int axis(Reviewer r, int criterion) const {
    return index_of(r) * criteria() + criterion;
  }
  // Axes of reviewer r for criteria [first, last).
  std::vector<int> axes(Reviewer r, int first, int last) const;
  double min_entry() const;
  bool has_full_support() const { return min_entry() > 0.0; }

 private:
  CriteriaHierarchy hierarchy_;
  Table table_;
};

struct AssumptionReport {
  double min_entry = 0.0;
  bool full_support = false;
  // Largest I(X_{k'}^{[T]} \ X_{k'}^t ; X_k^t | X_k^{[t-1]}, X_{k'}^t).
  double max_conditional_independence_violation = 0.0;
  bool conditional_independence = false;
  // Smallest, over criteria, reviewer permutations and distinct signal
  // pairs, of the largest sup-norm gap between the two induced beliefs.
  double min_relevance_gap = 0.0;
  bool stochastic_relevance = false;

  bool all_pass() const {
    return full_support && conditional_independence && stochastic_relevance;
  }
};

inline constexpr double kConditionalIndependenceThreshold = 1e-9;
inline constexpr double kRelevanceThreshold = 1e-9;

AssumptionReport check_assumptions(
    const JointPrior& prior,
    double independence_threshold = kConditionalIndependenceThreshold,
    double relevance_threshold = kRelevanceThreshold);

}  // namespace hdipp

#endif  // HDIPP_PROBABILITY_H_
