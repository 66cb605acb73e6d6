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

// Spectral and abundance angle distances and endmember matching.

#ifndef MLUNMIX_METRICS_HPP_
#define MLUNMIX_METRICS_HPP_

#include <span>
#include <vector>

#include "mlunmix/types.hpp"

namespace mlunmix {

struct GroundTruth;
struct UnmixResult;

// arccos of the cosine similarity, clamped to [-1, 1] first. Throws
// DomainError on a zero vector and DimensionError on a length mismatch.
double sad(const Eigen::Ref<const Vector>& m, const Eigen::Ref<const Vector>& m_hat);
double aad(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& a_hat);

// Root mean square of a list of angles (pairwise summation).
double rms_sad(std::span<const double> sads);
double rms_aad(std::span<const double> aads);

// Sum with pairwise (cascade) ordering, independent of thread count.
double pairwise_sum(std::span<const double> values);

// Minimum total-SAD bijection between estimated and true endmembers. An
// all-zero estimated column scores pi/2 against every true column.
// Result[e] is the true index matched with estimated column e.
std::vector<Index> match_endmembers(const Matrix& a_true, const Matrix& a_est);

// Square assignment problem (Hungarian method). Result[r] is the column
// assigned to row r.
std::vector<Index> solve_assignment(const Matrix& cost);

struct EvalReport {
  std::vector<double> per_endmember_sad;  // indexed by true endmember
  double rms_sad = 0.0;
  double rms_aad = 0.0;
  std::vector<Index> assignment;  // estimated index -> true index
  Index excluded_pixels = 0;      // zero abundance columns skipped in AAD
};

EvalReport evaluate(const Matrix& a_true, const Matrix& s_true,
                    const Matrix& a_est, const Matrix& s_est);
EvalReport evaluate(const GroundTruth& truth, const UnmixResult& result);

}  // namespace mlunmix

#endif  // MLUNMIX_METRICS_HPP_
