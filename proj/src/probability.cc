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

#include "hdipp/probability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace hdipp {
namespace {

void check_axes(const Table& joint, std::span<const int> axes,
                std::vector<char>& used, const char* what) {
  for (int a : axes) {
    if (a < 0 || a >= joint.rank()) {
      throw UsageError(std::string(what) + ": axis out of range");
    }
    if (used[static_cast<std::size_t>(a)]) {
      throw UsageError(std::string(what) + ": overlapping or repeated axes");
    }
    used[static_cast<std::size_t>(a)] = 1;
  }
}

// Marginal without the normalization step; used internally where the joint
// is already normalized.
Table project(const Table& joint, std::span<const int> keep) {
  std::vector<int> shape;
  shape.reserve(keep.size());
  for (int a : keep) shape.push_back(joint.shape()[static_cast<std::size_t>(a)]);
  Table out = Table::zeros(shape);

  // Stride of each source axis inside the output (0 when summed out).
  std::vector<std::size_t> out_stride(static_cast<std::size_t>(joint.rank()), 0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out_stride[static_cast<std::size_t>(keep[i])] = out.stride(static_cast<int>(i));
  }

  const int rank = joint.rank();
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  std::size_t out_flat = 0;
  const auto& src_shape = joint.shape();
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    out[out_flat] += joint[flat];
    // Odometer increment on the last axis first.
    for (int a = rank - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      if (++idx[ua] < src_shape[ua]) {
        out_flat += out_stride[ua];
        break;
      }
      out_flat -= out_stride[ua] * static_cast<std::size_t>(src_shape[ua] - 1);
      idx[ua] = 0;
    }
  }
  return out;
}

}  // namespace

Distribution::Distribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.size() < 2) throw UsageError("distribution needs support size >= 2");
  double total = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw UsageError("distribution entries must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os << "distribution sums to " << total << ", not 1";
    throw UsageError(os.str());
  }
}

Distribution Distribution::uniform(int size) {
  return Distribution(std::vector<double>(static_cast<std::size_t>(size),
                                          1.0 / size));
}

Distribution Distribution::point_mass(int size, int value) {
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  p.at(static_cast<std::size_t>(value)) = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::from_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ProbabilityError("cannot normalize zero mass");
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

int Distribution::mode() const {
  return static_cast<int>(std::max_element(p_.begin(), p_.end()) - p_.begin());
}

std::size_t cell_count(std::span<const int> shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

Table::Table(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (int d : shape_) {
    if (d < 1) throw UsageError("table axes must have positive size");
  }
  if (cell_count(shape_) != data_.size()) {
    throw UsageError("table data does not match its shape");
  }
  strides_.assign(shape_.size(), 1);
  for (int a = rank() - 2; a >= 0; --a) {
    const auto ua = static_cast<std::size_t>(a);
    strides_[ua] = strides_[ua + 1] * static_cast<std::size_t>(shape_[ua + 1]);
  }
}

Table Table::zeros(std::vector<int> shape) {
  const std::size_t n = cell_count(shape);
  return Table(std::move(shape), std::vector<double>(n, 0.0));
}

std::size_t Table::flat_index(std::span<const int> assignment) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    flat += strides_[a] * static_cast<std::size_t>(assignment[a]);
  }
  return flat;
}

void Table::unravel(std::size_t flat, std::span<int> assignment) const {
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    assignment[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
}

double Table::sum() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

Table marginal(const Table& joint, std::span<const int> keep) {
  if (keep.empty()) throw UsageError("marginal: keep set is empty");
  std::vector<char> used(static_cast<std::size_t>(joint.rank()), 0);
  check_axes(joint, keep, used, "marginal");
  Table out = project(joint, keep);
  const double total = out.sum();
  if (!(total > 0.0)) throw ProbabilityError("marginal: zero total mass");
  for (double& v : out.mutable_data()) v /= total;
  return out;
}

Distribution marginal_distribution(const Table& joint, int axis) {
  const int keep[] = {axis};
  Table m = marginal(joint, keep);
  return Distribution(std::vector<double>(m.data().begin(), m.data().end()));
}

Distribution conditional(const Table& joint, int target,
                         std::span<const AxisValue> given) {
  std::vector<char> used(static_cast<std::size_t>(joint.rank()), 0);
  const int t[] = {target};
  check_axes(joint, t, used, "conditional");
  std::vector<int> fixed(static_cast<std::size_t>(joint.rank()), -1);
  for (const auto& g : given) {
    const int a[] = {g.axis};
    check_axes(joint, a, used, "conditional");
    if (g.value < 0 || g.value >= joint.shape()[static_cast<std::size_t>(g.axis)]) {
      throw UsageError("conditional: given value out of range");
    }
    fixed[static_cast<std::size_t>(g.axis)] = g.value;
  }

  std::vector<double> weights(
      static_cast<std::size_t>(joint.shape()[static_cast<std::size_t>(target)]), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(joint.rank()));
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    joint.unravel(flat, idx);
    bool match = true;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (fixed[a] >= 0 && idx[a] != fixed[a]) {
        match = false;
        break;
      }
    }
    if (match) weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(target)])] += joint[flat];
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    throw ProbabilityError("conditional: conditioning event has probability 0");
  }
  return Distribution::from_weights(std::move(weights));
}

double entropy(const Distribution& d) {
  double h = 0.0;
  for (double p : d.probabilities()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw UsageError("kl_divergence: support size mismatch");
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw ProbabilityError("kl_divergence: q is zero where p is positive");
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double conditional_entropy(const Table& joint, std::span<const int> x,
                           std::span<const int> z) {
  if (x.empty()) return 0.0;
  std::vector<char> used(static_cast<std::size_t>(joint.rank()), 0);
  check_axes(joint, x, used, "conditional_entropy");
  check_axes(joint, z, used, "conditional_entropy");
  std::vector<int> keep(z.begin(), z.end());
  keep.insert(keep.end(), x.begin(), x.end());
  const Table xz = marginal(joint, keep);
  std::size_t block = 1;
  for (int a : x) block *= static_cast<std::size_t>(joint.shape()[static_cast<std::size_t>(a)]);
  double h = 0.0;
  for (std::size_t start = 0; start < xz.size(); start += block) {
    double pz = 0.0;
    for (std::size_t i = 0; i < block; ++i) pz += xz[start + i];
    if (pz <= 0.0) continue;
    for (std::size_t i = 0; i < block; ++i) {
      const double p = xz[start + i];
      if (p > 0.0) h -= p * std::log(p / pz);
    }
  }
  return std::max(h, 0.0);
}

double conditional_mutual_information(const Table& joint,
                                      std::span<const int> x,
                                      std::span<const int> y,
                                      std::span<const int> z) {
  std::vector<char> used(static_cast<std::size_t>(joint.rank()), 0);
  check_axes(joint, x, used, "conditional_mutual_information");
  check_axes(joint, y, used, "conditional_mutual_information");
  check_axes(joint, z, used, "conditional_mutual_information");
  if (x.empty() || y.empty()) return 0.0;

  // Layout (z, x, y) so each z value owns a contiguous x-by-y block.
  std::vector<int> keep(z.begin(), z.end());
  keep.insert(keep.end(), x.begin(), x.end());
  keep.insert(keep.end(), y.begin(), y.end());
  const Table zxy = marginal(joint, keep);
  std::size_t nx = 1, ny = 1;
  for (int a : x) nx *= static_cast<std::size_t>(joint.shape()[static_cast<std::size_t>(a)]);
  for (int a : y) ny *= static_cast<std::size_t>(joint.shape()[static_cast<std::size_t>(a)]);

  std::vector<double> px(nx), py(ny);
  double mi = 0.0;
  for (std::size_t start = 0; start < zxy.size(); start += nx * ny) {
    std::fill(px.begin(), px.end(), 0.0);
    std::fill(py.begin(), py.end(), 0.0);
    double pz = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const double p = zxy[start + i * ny + j];
        px[i] += p;
        py[j] += p;
        pz += p;
      }
    }
    if (pz <= 0.0) continue;
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const double p = zxy[start + i * ny + j];
        if (p > 0.0) mi += p * std::log(p * pz / (px[i] * py[j]));
      }
    }
  }
  return std::max(mi, 0.0);
}

double log_score(int outcome, const Distribution& forecast) {
  if (outcome < 0 || outcome >= forecast.size()) {
    throw UsageError("log_score: outcome outside the forecast support");
  }
  const double p = forecast[outcome];
  if (!(p > 0.0)) throw ProbabilityError("log_score: forecast is zero at outcome");
  return std::log(p);
}

Distribution apply_forecast_floor(const Distribution& forecast, double floor) {
  const auto p = forecast.probabilities();
  if (std::all_of(p.begin(), p.end(), [floor](double v) { return v >= floor; })) {
    return forecast;
  }
  std::vector<double> w(p.begin(), p.end());
  for (double& v : w) v = std::max(v, floor);
  return Distribution::from_weights(std::move(w));
}

std::size_t CriteriaHierarchy::own_cells() const {
  return cell_count(alphabet_sizes);
}

void CriteriaHierarchy::validate() const {
  if (alphabet_sizes.empty()) throw UsageError("hierarchy needs at least one criterion");
  for (int d : alphabet_sizes) {
    if (d < 2) throw UsageError("every criterion needs an alphabet of size >= 2");
  }
  if (!labels.empty() && labels.size() != alphabet_sizes.size()) {
    throw UsageError("hierarchy labels must match the number of criteria");
  }
}

JointPrior::JointPrior(CriteriaHierarchy hierarchy, Table table)
    : hierarchy_(std::move(hierarchy)), table_(std::move(table)) {
  hierarchy_.validate();
  const int T = hierarchy_.criteria();
  if (table_.rank() != 3 * T) throw UsageError("prior tensor must have 3T axes");
  for (int r = 0; r < 3; ++r) {
    for (int t = 0; t < T; ++t) {
      if (table_.shape()[static_cast<std::size_t>(r * T + t)] != hierarchy_.alphabet(t)) {
        throw UsageError("prior tensor axis size does not match the hierarchy");
      }
    }
  }
  double total = 0.0;
  for (double v : table_.data()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw UsageError("prior entries must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "prior sums to " << total << ", not 1";
    throw UsageError(os.str());
  }
}

std::vector<int> JointPrior::axes(Reviewer r, int first, int last) const {
  std::vector<int> out;
  for (int t = first; t < last; ++t) out.push_back(axis(r, t));
  return out;
}

double JointPrior::min_entry() const {
  const auto d = table_.data();
  return *std::min_element(d.begin(), d.end());
}

AssumptionReport check_assumptions(const JointPrior& prior,
                                   double independence_threshold,
                                   double relevance_threshold) {
  AssumptionReport report;
  report.min_entry = prior.min_entry();
  report.full_support = report.min_entry > 0.0;
  const int T = prior.criteria();
  const Table& joint = prior.table();

  double violation = 0.0;
  for (int t = 0; t < T; ++t) {
    for (Reviewer k : kAllReviewers) {
      for (Reviewer kp : kAllReviewers) {
        if (k == kp) continue;
        std::vector<int> others;
        for (int s = 0; s < T; ++s) {
          if (s != t) others.push_back(prior.axis(kp, s));
        }
        const int target[] = {prior.axis(k, t)};
        std::vector<int> given = prior.axes(k, 0, t);
        given.push_back(prior.axis(kp, t));
        violation = std::max(
            violation, conditional_mutual_information(joint, others, target, given));
      }
    }
  }
  report.max_conditional_independence_violation = violation;
  report.conditional_independence = violation <= independence_threshold;

  // For each criterion and each assignment of roles (first, second, third):
  // every pair of distinct signals of `second` must, for some signal of
  // `first`, induce different beliefs about `third`.
  double min_gap = std::numeric_limits<double>::infinity();
  const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int t = 0; t < T; ++t) {
    const int d = prior.hierarchy().alphabet(t);
    for (const auto& perm : perms) {
      const int keep[] = {prior.axis(reviewer_at(perm[0]), t),
                          prior.axis(reviewer_at(perm[1]), t),
                          prior.axis(reviewer_at(perm[2]), t)};
      const Table layer = marginal(joint, keep);
      for (int b = 0; b < d; ++b) {
        for (int bt = b + 1; bt < d; ++bt) {
          double best = 0.0;
          for (int a = 0; a < d; ++a) {
            double mb = 0.0, mbt = 0.0;
            for (int c = 0; c < d; ++c) {
              mb += layer[static_cast<std::size_t>((a * d + b) * d + c)];
              mbt += layer[static_cast<std::size_t>((a * d + bt) * d + c)];
            }
            if (mb <= 0.0 || mbt <= 0.0) continue;
            double gap = 0.0;
            for (int c = 0; c < d; ++c) {
              gap = std::max(gap, std::abs(layer[static_cast<std::size_t>((a * d + b) * d + c)] / mb -
                                           layer[static_cast<std::size_t>((a * d + bt) * d + c)] / mbt));
            }
            best = std::max(best, gap);
          }
          min_gap = std::min(min_gap, best);
        }
      }
    }
  }
  report.min_relevance_gap = min_gap;
  report.stochastic_relevance = min_gap > relevance_threshold;
  return report;
}

}  // namespace hdipp
