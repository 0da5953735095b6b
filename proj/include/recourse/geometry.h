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

// Per-input geometry shared by the prototype selectors: unit direction
// vectors from the input to each candidate, their cosine similarity matrix,
// distances, and a truncated eigenbasis of the similarity matrix.

#ifndef RECOURSE_GEOMETRY_H_
#define RECOURSE_GEOMETRY_H_

#include <string>
#include <vector>

#include "recourse/common.h"

namespace recourse {

struct DirectionMatrix {
  Vector x0;
  Matrix A;  // p x N, unit columns
  // Row of the caller's sample matrix behind each column of A.
  std::vector<int> sample_index;
  // Samples coincident with x0 (norm <= 1e-12), dropped from A.
  std::vector<int> excluded;
};

// Column i of A is (sample_i - x0) / ||sample_i - x0||. `samples` is N x p.
DirectionMatrix ComputeDirections(const Eigen::Ref<const Vector>& x0,
                                  const Matrix& samples);

// S = A^T A.
Matrix Similarity(const Matrix& A);

enum class DistanceKind { kEuclidean, kGraph };

struct DistanceVector {
  Vector d;
  DistanceKind kind = DistanceKind::kEuclidean;
  // Caller-side index of each entry of d and the indices dropped as
  // unreachable (graph kind only).
  std::vector<int> kept;
  std::vector<int> dropped;
};

DistanceVector EuclideanDistances(const Eigen::Ref<const Vector>& x0,
                                  const Matrix& samples);

// Top eigenpairs of S = sum_m sigma_m v_m v_m^T, sigma decreasing.
struct EigenBasis {
  Vector sigma;  // M
  Matrix v;      // N x M, orthonormal columns
  int requested = 0;
  std::string report;  // set when M was reduced to the numerical rank

  int rank() const { return static_cast<int>(sigma.size()); }
  // S_M = sum_m sigma_m v_m v_m^T.
  Matrix Reconstruct() const;
};

// Eigenvalues at or below this are treated as zero.
inline constexpr double kEigenRankTolerance = 1e-10;

// Eigenbasis of S = A^T A from a thin SVD of A: sigma = squared singular
// values, v = right singular vectors. M is reduced to the numerical rank.
EigenBasis EigenBasisFromDirections(const Matrix& A, int M);

// Same contract, decomposing a symmetric S directly.
EigenBasis EigenBasisFromSimilarity(const Matrix& S, int M);

// min(p, 20, rank(S)) with rank taken from the singular values of A.
int DefaultEigenRank(const Matrix& A);

}  // namespace recourse

#endif  // RECOURSE_GEOMETRY_H_
