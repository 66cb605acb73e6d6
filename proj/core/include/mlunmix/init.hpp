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

// Layer initialization: vertex component analysis (VCA) and seeded random
// factors.
//
// The VCA variant implemented here:
//   1. Mean-remove X and project onto its top (P - 1) principal directions.
//   2. Append a constant coordinate c = max projected column norm, so the
//      P-dimensional points lie on an affine hyperplane and every simplex
//      vertex stays linearly independent of the others.
//   3. For i = 1..P draw a Gaussian direction, remove its component in the
//      span of the endmembers selected so far (initially the constant axis),
//      and take the not-yet-selected pixel with the largest absolute
//      projection onto it.
// For P = 1 step 2 is skipped and the single principal direction is used.
// Selected signatures are verbatim columns of X; S0 is uniform 1/P.

#ifndef MLUNMIX_INIT_HPP_
#define MLUNMIX_INIT_HPP_

#include <cstdint>
#include <vector>

#include "mlunmix/types.hpp"

namespace mlunmix {

enum class InitMode { Vca, Random };

const char* to_string(InitMode mode);

struct InitResult {
  Matrix a0;  // B x P
  Matrix s0;  // P x N
  InitMode method = InitMode::Vca;
  std::vector<Index> selected_pixel_indices;  // VCA only
};

// Numerical rank of X from the eigenvalues of its Gram matrix.
Index numerical_rank(const Matrix& x);

InitResult vca_endmembers(const Matrix& x, int p, std::uint64_t seed);

// A0 (b x p) and S0 (p x n) with i.i.d. uniform (0, 1] entries.
InitResult random_init(Index b, Index p, Index n, std::uint64_t seed);

}  // namespace mlunmix

#endif  // MLUNMIX_INIT_HPP_
