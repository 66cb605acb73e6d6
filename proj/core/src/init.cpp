// Copyright 2026 The mlunmix Authors. All Rights Reserved.
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

#include "mlunmix/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlunmix/rng.hpp"

namespace mlunmix {

const char* to_string(InitMode mode) {
  return mode == InitMode::Vca ? "vca" : "random";
}

Index numerical_rank(const Matrix& x) {
  if (x.size() == 0) return 0;
  const Matrix gram = x.rows() <= x.cols() ? Matrix(x * x.transpose())
                                           : Matrix(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0;
  // Singular values below 1e-6 of the largest count as zero.
  const double cutoff = top * 1e-12;
  return static_cast<Index>((ev.array() > cutoff).count());
}

InitResult vca_endmembers(const Matrix& x, int p, std::uint64_t seed) {
  require_nonnegative(x, "VCA input");
  if (p < 1) throw ConfigError("VCA needs p >= 1");
  if (p > std::min(x.rows(), x.cols())) {
    throw ConfigError("VCA: p = " + std::to_string(p) +
                      " exceeds min(bands, pixels) = " +
                      std::to_string(std::min(x.rows(), x.cols())));
  }
  const Index rank = numerical_rank(x);
  if (rank == 0) throw DomainError("VCA input is all zero");
  if (p > rank) {
    throw ConfigError("VCA: p = " + std::to_string(p) +
                      " exceeds the data rank; achievable rank is " +
                      std::to_string(rank));
  }

  const Index n = x.cols();
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  // Eigenvalues ascend; the principal directions are the trailing columns.
  const Index subspace = std::max(p - 1, 1);
  const Matrix basis = eig.eigenvectors().rightCols(subspace).rowwise().reverse();
  const Matrix projected = basis.transpose() * centered;

  Matrix y;
  if (p == 1) {
    y = projected;
  } else {
    const double c = projected.colwise().norm().maxCoeff();
    y.resize(p, n);
    y.topRows(p - 1) = projected;
    y.row(p - 1).setConstant(c > 0.0 ? c : 1.0);
  }

  Rng rng(seed);
  const Index dim = y.rows();
  std::vector<Index> selected;
  selected.reserve(static_cast<std::size_t>(p));
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  // Orthonormal basis of the span to avoid. Starts as the constant axis.
  Matrix span(dim, 0);
  if (p > 1) {
    span = Matrix::Zero(dim, 1);
    span(dim - 1, 0) = 1.0;
  }

  for (int i = 0; i < p; ++i) {
    Vector f(dim);
    double fnorm = 0.0;
    for (int attempt = 0; attempt < 64 && !(fnorm > 1e-12); ++attempt) {
      for (Index k = 0; k < dim; ++k) f(k) = rng.normal();
      if (span.cols() > 0) f -= span * (span.transpose() * f);
      fnorm = f.norm();
    }
    if (!(fnorm > 1e-12)) {
      throw DomainError("VCA: could not find a direction orthogonal to the "
                        "selected endmembers");
    }
    f /= fnorm;
    const Vector proj = (f.transpose() * y).transpose();

    Index best = -1;
    double best_value = -1.0;
    for (Index j = 0; j < n; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      const double v = std::abs(proj(j));
      if (v > best_value) {
        best_value = v;
        best = j;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    selected.push_back(best);

    // Span of the selected endmembers in the projected space.
    Matrix chosen(dim, static_cast<Index>(selected.size()));
    for (std::size_t k = 0; k < selected.size(); ++k) {
      chosen.col(static_cast<Index>(k)) = y.col(selected[k]);
    }
    Eigen::HouseholderQR<Matrix> qr(chosen);
    const Index cols = std::min(dim, chosen.cols());
    span = qr.householderQ() * Matrix::Identity(dim, cols);
  }

  InitResult out;
  out.method = InitMode::Vca;
  out.a0.resize(x.rows(), p);
  for (int k = 0; k < p; ++k) out.a0.col(k) = x.col(selected[static_cast<std::size_t>(k)]);
  out.s0 = Matrix::Constant(p, n, 1.0 / static_cast<double>(p));
  out.selected_pixel_indices = std::move(selected);
  return out;
}

InitResult random_init(Index b, Index p, Index n, std::uint64_t seed) {
  if (b < 1 || p < 1 || n < 1) {
    throw ConfigError("random_init needs positive dimensions");
  }
  Rng rng(seed);
  InitResult out;
  out.method = InitMode::Random;
  out.a0.resize(b, p);
  out.s0.resize(p, n);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < b; ++i) out.a0(i, j) = rng.uniform_open_closed();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < p; ++i) out.s0(i, j) = rng.uniform_open_closed();
  return out;
}

}  // namespace mlunmix
