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

#include "recourse/common.h"

#include <algorithm>
#include <numeric>

namespace recourse {

long double BinomialCapped(long long n, long long k, long double cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double result = 1;
  for (long long i = 1; i <= k; ++i) {
    result = result * static_cast<long double>(n - k + i) /
             static_cast<long double>(i);
    if (result > cap) return cap + 1;
  }
  return result;
}

IndexSet KSmallest(const Vector& values, int k) {
  const int n = static_cast<int>(values.size());
  if (k < 0 || k > n) {
    throw RecourseError("KSmallest: k=" + std::to_string(k) + " outside [0, " +
                        std::to_string(n) + "]");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&values](int a, int b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), less);
  IndexSet out(order.begin(), order.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

Vector Indicator(const IndexSet& indices, int n) {
  Vector z = Vector::Zero(n);
  for (int i : indices) z[i] = 1.0;
  return z;
}

}  // namespace recourse
