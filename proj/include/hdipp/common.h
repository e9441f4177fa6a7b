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

#ifndef HDIPP_COMMON_H_
#define HDIPP_COMMON_H_

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hdipp {

// Tolerances shared by every module.
inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-10;

// Caller supplied malformed or inconsistent input. The CLI maps this to exit
// code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation would exceed the desk-scale enumeration budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A probability query hit an impossible event (zero-probability
// conditioning, zero forecast at the realized outcome, ...).
class ProbabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The reviewer triplet assigned to one paper.
enum class Reviewer : int { kA = 0, kB = 1, kC = 2 };

inline constexpr std::array<Reviewer, 3> kAllReviewers = {
    Reviewer::kA, Reviewer::kB, Reviewer::kC};

constexpr int index_of(Reviewer r) { return static_cast<int>(r); }

constexpr Reviewer reviewer_at(int i) { return static_cast<Reviewer>(i % 3); }

inline std::string_view reviewer_name(Reviewer r) {
  static constexpr std::array<std::string_view, 3> kNames = {"A", "B", "C"};
  return kNames[index_of(r)];
}

inline Reviewer parse_reviewer(std::string_view name) {
  if (name == "A") return Reviewer::kA;
  if (name == "B") return Reviewer::kB;
  if (name == "C") return Reviewer::kC;
  throw UsageError("unknown reviewer '" + std::string(name) + "'");
}

}  // namespace hdipp

#endif  // HDIPP_COMMON_H_
