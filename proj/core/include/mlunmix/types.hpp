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

// Shared data model for linear spectral unmixing.
//
// Orientation follows the linear mixing model X = A S + E:
//   X  is B x N   (bands x pixels), one column per pixel,
//   A  is B x P   (bands x endmembers), one column per endmember,
//   S  is P x N   (endmembers x pixels), one abundance column per pixel.
// Pixels of an image with spatial dims (rows, cols) are stored row-major:
// pixel index n = r * cols + c.

#ifndef MLUNMIX_TYPES_HPP_
#define MLUNMIX_TYPES_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlunmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the domain of an operation (negative entries, zero
// vectors, non-finite input).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid tunables, e.g. more endmembers than the data can support.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable input files.
class DataError : public Error {
 public:
  using Error::Error;
};

// A factor became NaN or Inf during the multiplicative updates.
class SolverDivergence : public Error {
 public:
  SolverDivergence(int layer, int iteration);
  int layer() const { return layer_; }
  int iteration() const { return iteration_; }

 private:
  int layer_;
  int iteration_;
};

struct SpatialDims {
  Index rows = 0;
  Index cols = 0;
};

// Observed hyperspectral data, B x N, nonnegative.
class SpectralCube {
 public:
  explicit SpectralCube(Matrix data, std::optional<SpatialDims> dims = {},
                        std::vector<double> wavelengths_nm = {});

  const Matrix& data() const { return data_; }
  Index bands() const { return data_.rows(); }
  Index pixels() const { return data_.cols(); }
  const std::optional<SpatialDims>& spatial_dims() const { return dims_; }
  const std::vector<double>& wavelengths_nm() const { return wavelengths_; }

 private:
  Matrix data_;
  std::optional<SpatialDims> dims_;
  std::vector<double> wavelengths_;
};

// Endmember spectra, B x P. Zero columns are rejected.
class SignatureMatrix {
 public:
  explicit SignatureMatrix(Matrix data, std::vector<std::string> names = {});

  const Matrix& data() const { return data_; }
  Index bands() const { return data_.rows(); }
  Index endmembers() const { return data_.cols(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  Matrix data_;
  std::vector<std::string> names_;
};

inline constexpr double kSumToOneTolerance = 1e-6;

// Abundance fractions, P x N. When constructed with `normalized = true`
// every column must sum to one within kSumToOneTolerance.
class AbundanceMatrix {
 public:
  explicit AbundanceMatrix(Matrix data, bool normalized = false);

  const Matrix& data() const { return data_; }
  Index endmembers() const { return data_.rows(); }
  Index pixels() const { return data_.cols(); }
  bool normalized() const { return normalized_; }

  // True when every column sums to one within `tolerance`.
  bool columns_sum_to_one(double tolerance = kSumToOneTolerance) const;

 private:
  Matrix data_;
  bool normalized_;
};

// Additive observation noise; may contain negative values.
struct NoiseField {
  Matrix data;
  double sigma = 0.0;
};

// Throws DomainError unless every entry is finite and >= 0.
void require_nonnegative(const Matrix& m, const char* what);

bool all_finite(const Matrix& m);

// Sum of q-th powers of the entries, without an outer root:
//   qnorm(M, q) = sum_ij m_ij^q.
double qnorm(const Matrix& m, double q);

// A * S with shape checking.
Matrix reconstruct(const Matrix& a, const Matrix& s);
Matrix reconstruct(const SignatureMatrix& a, const AbundanceMatrix& s);

// 0.5 * ||X - A S||_F^2.
double frobenius_cost(const Matrix& x, const Matrix& a, const Matrix& s);
double frobenius_cost(const Matrix& x, const SignatureMatrix& a,
                      const AbundanceMatrix& s);

}  // namespace mlunmix

#endif  // MLUNMIX_TYPES_HPP_
