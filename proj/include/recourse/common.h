// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECOURSE_COMMON_H_
#define RECOURSE_COMMON_H_

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace recourse {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sorted, duplicate-free list of 0-based indices.
using IndexSet = std::vector<int>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// All library failures surface as this exception; the message names the
// offending input (row, column, field, ...).
class RecourseError : public std::runtime_error {
 public:
  explicit RecourseError(const std::string& what) : std::runtime_error(what) {}
};

// A chosen subset of K candidates. `report` is non-empty when a solver had to
// deviate from its nominal behavior (early stop, reduced rank, ...).
struct Selection {
  IndexSet indices;
  std::string report;
};

// Number of K-subsets of an n-set, saturating at `cap + 1`.
long double BinomialCapped(long long n, long long k, long double cap);

// Indices of the k smallest entries of `values`, ties to the lowest index,
// returned sorted ascending.
IndexSet KSmallest(const Vector& values, int k);

// Indicator vector of length n for `indices`.
Vector Indicator(const IndexSet& indices, int n);

}  // namespace recourse

#endif  // RECOURSE_COMMON_H_
