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

// Multilayer NMF.
//
// Layer 1 factors X (B x N) into A1 (B x P) S1 (P x N). Every following
// layer factors the previous abundances, S_{l-1} = A_l S_l with A_l P x P.
// The final model is A = A1 A2 ... AL and S = SL. All L layers always run;
// each one stops early on its own convergence test.

#ifndef MLUNMIX_MLNMF_HPP_
#define MLUNMIX_MLNMF_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlunmix/init.hpp"
#include "mlunmix/nmf.hpp"
#include "mlunmix/types.hpp"

namespace mlunmix {

// How layers >= 2 are started. Warm begins near the identity factorization
// of the previous layer's output; Random draws both factors uniformly.
enum class DeepInit { Warm, Random };

std::string to_string(DeepInit d);
DeepInit parse_deep_init(const std::string& s);

struct MlnmfConfig {
  int p = 6;
  int layers = 10;
  LayerConfig layer;
  InitMode init = InitMode::Vca;  // layer 1 only
  DeepInit deep_init = DeepInit::Warm;
  // Replace the uniform layer-1 abundances by an FCLS estimate for A0.
  bool fcls_start = true;
  // Rescale delta in layers >= 2 by the rms column norm of the layer input
  // relative to the observation.
  bool scale_delta = true;
  double warm_mix = 0.1;  // off-diagonal weight of the warm A_l
  std::uint64_t seed = 0;

  void validate() const;
};

struct UnmixResult {
  Matrix a;  // composed signatures, B x P
  Matrix s;  // final abundances, P x N
  std::vector<LayerResult> per_layer;
  std::vector<Index> vca_indices;  // pixels picked by VCA for layer 1
  MlnmfConfig config;
};

// Seeds for the layer-1 initializer and for layer l >= 2.
std::uint64_t layer_seed(std::uint64_t master, int layer);

double rms_column_norm(const Matrix& m);

// delta used in layer l given that layer's input.
double layer_delta(const MlnmfConfig& cfg, const Matrix& x1, const Matrix& xl,
                   int layer);

// Warm start for a deep layer: A = (1 - w) I + w R / P with R uniform (0,1],
// S = previous output floored at kPowerFloor.
InitResult warm_init(const Matrix& previous_s, double w, std::uint64_t seed);

// Left-to-right product of the per-layer mixing matrices.
Matrix compose_signatures(std::span<const Matrix> layer_as);

UnmixResult run_mlnmf(const SpectralCube& x, const MlnmfConfig& cfg);

}  // namespace mlunmix

#endif  // MLUNMIX_MLNMF_HPP_
