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

#include "recourse/geometry.h"

#include <algorithm>
#include <cmath>

namespace recourse {
namespace {

constexpr double kCoincidentNorm = 1e-12;
constexpr double kSignTolerance = 1e-9;

// First coordinate with |value| > 1e-9 is made positive.
void FixSigns(Matrix* v) {
  for (Eigen::Index m = 0; m < v->cols(); ++m) {
    for (Eigen::Index i = 0; i < v->rows(); ++i) {
      const double value = (*v)(i, m);
      if (std::abs(value) > kSignTolerance) {
        if (value < 0) v->col(m) *= -1.0;
        break;
      }
    }
  }
}

EigenBasis Truncate(const Vector& eigenvalues, const Matrix& vectors, int M) {
  // `eigenvalues` sorted decreasing.
  if (M < 1) throw RecourseError("eigenbasis: M must be >= 1");
  int rank = 0;
  while (rank < eigenvalues.size() && eigenvalues[rank] > kEigenRankTolerance) {
    ++rank;
  }
  EigenBasis basis;
  basis.requested = M;
  const int kept = std::min(M, rank);
  if (kept < M) {
    basis.report = "requested M=" + std::to_string(M) +
                   " reduced to numerical rank " + std::to_string(kept);
  }
  basis.sigma = eigenvalues.head(kept);
  basis.v = vectors.leftCols(kept);
  FixSigns(&basis.v);
  return basis;
}

}  // namespace

DirectionMatrix ComputeDirections(const Eigen::Ref<const Vector>& x0,
                                  const Matrix& samples) {
  if (samples.cols() != x0.size()) {
    throw RecourseError("directions: samples have dimension " +
                        std::to_string(samples.cols()) + ", input has " +
                        std::to_string(x0.size()));
  }
  DirectionMatrix out;
  out.x0 = x0;
  std::vector<Vector> columns;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    Vector diff = samples.row(i).transpose() - x0;
    const double norm = diff.norm();
    if (norm <= kCoincidentNorm) {
      out.excluded.push_back(static_cast<int>(i));
      continue;
    }
    columns.push_back(diff / norm);
    out.sample_index.push_back(static_cast<int>(i));
  }
  out.A.resize(x0.size(), static_cast<Eigen::Index>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) {
    out.A.col(static_cast<Eigen::Index>(c)) = columns[c];
  }
  return out;
}

Matrix Similarity(const Matrix& A) {
  Matrix S = A.transpose() * A;
  // Symmetrize exactly so downstream factorizations see S_ij == S_ji.
  return 0.5 * (S + S.transpose());
}

DistanceVector EuclideanDistances(const Eigen::Ref<const Vector>& x0,
                                  const Matrix& samples) {
  DistanceVector out;
  out.kind = DistanceKind::kEuclidean;
  out.d.resize(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    out.d[i] = (samples.row(i).transpose() - x0).norm();
    out.kept.push_back(static_cast<int>(i));
  }
  return out;
}

Matrix EigenBasis::Reconstruct() const {
  return v * sigma.asDiagonal() * v.transpose();
}

EigenBasis EigenBasisFromDirections(const Matrix& A, int M) {
  if (A.cols() == 0) throw RecourseError("eigenbasis: no directions");
  if (M < 1 || M > A.cols()) {
    throw RecourseError("eigenbasis: M=" + std::to_string(M) +
                        " outside [1, N=" + std::to_string(A.cols()) + "]");
  }
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinV);
  const Vector eigenvalues = svd.singularValues().array().square();
  return Truncate(eigenvalues, svd.matrixV(), M);
}

EigenBasis EigenBasisFromSimilarity(const Matrix& S, int M) {
  if (S.rows() != S.cols() || S.rows() == 0) {
    throw RecourseError("eigenbasis: S must be square and non-empty");
  }
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw RecourseError("eigenbasis: S is not symmetric");
  }
  if (M < 1 || M > S.rows()) {
    throw RecourseError("eigenbasis: M=" + std::to_string(M) +
                        " outside [1, N=" + std::to_string(S.rows()) + "]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  // Ascending order from Eigen; reverse to decreasing.
  const Vector eigenvalues = solver.eigenvalues().reverse();
  const Matrix vectors = solver.eigenvectors().rowwise().reverse();
  return Truncate(eigenvalues, vectors, M);
}

int DefaultEigenRank(const Matrix& A) {
  if (A.cols() == 0) throw RecourseError("eigenbasis: no directions");
  Eigen::BDCSVD<Matrix> svd(A);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] * svd.singularValues()[i] >
        kEigenRankTolerance) {
      ++rank;
    }
  }
  return std::max(1, std::min<int>({static_cast<int>(A.rows()), 20, rank}));
}

}  // namespace recourse
