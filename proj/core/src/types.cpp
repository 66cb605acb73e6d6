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

#include "mlunmix/types.hpp"

#include <cmath>
#include <sstream>

namespace mlunmix {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_product_shapes(const Matrix& a, const Matrix& s) {
  if (a.cols() != s.rows()) {
    throw DimensionError("inner dimensions disagree: A is " + shape(a) +
                         ", S is " + shape(s));
  }
}

}  // namespace

SolverDivergence::SolverDivergence(int layer, int iteration)
    : Error("solver diverged (non-finite factor) in layer " +
            std::to_string(layer) + " at iteration " +
            std::to_string(iteration)),
      layer_(layer),
      iteration_(iteration) {}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_nonnegative(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + " contains non-finite values");
  }
  if (m.size() > 0 && m.minCoeff() < 0.0) {
    throw DomainError(std::string(what) + " contains negative values");
  }
}

SpectralCube::SpectralCube(Matrix data, std::optional<SpatialDims> dims,
                           std::vector<double> wavelengths_nm)
    : data_(std::move(data)),
      dims_(dims),
      wavelengths_(std::move(wavelengths_nm)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw DimensionError("spectral cube needs at least one band and pixel");
  }
  require_nonnegative(data_, "spectral cube");
  if (dims_ && dims_->rows * dims_->cols != data_.cols()) {
    throw DimensionError("spatial dims " + std::to_string(dims_->rows) + "x" +
                         std::to_string(dims_->cols) + " do not match " +
                         std::to_string(data_.cols()) + " pixels");
  }
  if (!wavelengths_.empty() &&
      static_cast<Index>(wavelengths_.size()) != data_.rows()) {
    throw DimensionError("wavelength list length differs from band count");
  }
}

SignatureMatrix::SignatureMatrix(Matrix data, std::vector<std::string> names)
    : data_(std::move(data)), names_(std::move(names)) {
  require_nonnegative(data_, "signature matrix");
  for (Index j = 0; j < data_.cols(); ++j) {
    if (data_.col(j).isZero(0.0)) {
      throw DomainError("signature column " + std::to_string(j) +
                        " is all zero");
    }
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != data_.cols()) {
    throw DimensionError("signature name count differs from column count");
  }
}

AbundanceMatrix::AbundanceMatrix(Matrix data, bool normalized)
    : data_(std::move(data)), normalized_(normalized) {
  require_nonnegative(data_, "abundance matrix");
  if (normalized_ && !columns_sum_to_one()) {
    throw DomainError("abundance columns do not sum to one");
  }
}

bool AbundanceMatrix::columns_sum_to_one(double tolerance) const {
  if (data_.cols() == 0) return true;
  return ((data_.colwise().sum().array() - 1.0).abs() <= tolerance).all();
}

double qnorm(const Matrix& m, double q) {
  if (!(q > 0.0)) throw DomainError("qnorm requires q > 0");
  require_nonnegative(m, "qnorm argument");
  if (q == 1.0) return m.sum();
  if (q == 0.5) return m.array().sqrt().sum();
  return m.array().pow(q).sum();
}

Matrix reconstruct(const Matrix& a, const Matrix& s) {
  require_product_shapes(a, s);
  return a * s;
}

Matrix reconstruct(const SignatureMatrix& a, const AbundanceMatrix& s) {
  return reconstruct(a.data(), s.data());
}

double frobenius_cost(const Matrix& x, const Matrix& a, const Matrix& s) {
  require_product_shapes(a, s);
  if (x.rows() != a.rows() || x.cols() != s.cols()) {
    throw DimensionError("observation is " + shape(x) + " but A S is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(s.cols()));
  }
  return 0.5 * (x - a * s).squaredNorm();
}

double frobenius_cost(const Matrix& x, const SignatureMatrix& a,
                      const AbundanceMatrix& s) {
  return frobenius_cost(x, a.data(), s.data());
}

}  // namespace mlunmix
