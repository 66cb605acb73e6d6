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

#include "mlunmix/mlnmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlunmix/rng.hpp"

namespace mlunmix {

std::string to_string(DeepInit d) {
  return d == DeepInit::Warm ? "warm" : "random";
}

DeepInit parse_deep_init(const std::string& s) {
  if (s == "warm") return DeepInit::Warm;
  if (s == "random") return DeepInit::Random;
  throw ConfigError("unknown deep init '" + s + "' (expected warm or random)");
}

void MlnmfConfig::validate() const {
  if (p < 1) throw ConfigError("p must be >= 1");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (!(warm_mix >= 0.0 && warm_mix <= 1.0)) {
    throw ConfigError("warm_mix must lie in [0, 1]");
  }
  layer.validate();
}

std::uint64_t layer_seed(std::uint64_t master, int layer) {
  return derive_seed(master, {0x6c61796572ULL, static_cast<std::uint64_t>(layer)});
}

double rms_column_norm(const Matrix& m) {
  if (m.cols() == 0) return 0.0;
  return std::sqrt(m.squaredNorm() / static_cast<double>(m.cols()));
}

double layer_delta(const MlnmfConfig& cfg, const Matrix& x1, const Matrix& xl,
                   int layer) {
  if (layer <= 1 || !cfg.scale_delta) return cfg.layer.delta;
  const double ref = rms_column_norm(x1);
  if (ref <= 0.0) return cfg.layer.delta;
  return cfg.layer.delta * rms_column_norm(xl) / ref;
}

InitResult warm_init(const Matrix& previous_s, double w, std::uint64_t seed) {
  const Index p = previous_s.rows();
  Rng rng(seed);
  InitResult out;
  out.a0.resize(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      out.a0(i, j) = w * rng.uniform_open_closed() / static_cast<double>(p);
    }
    out.a0(j, j) += 1.0 - w;
  }
  out.s0 = previous_s.cwiseMax(kPowerFloor);
  out.method = InitMode::Random;
  return out;
}

Matrix compose_signatures(std::span<const Matrix> layer_as) {
  if (layer_as.empty()) throw DimensionError("no layer matrices to compose");
  Matrix out = layer_as.front();
  for (std::size_t l = 1; l < layer_as.size(); ++l) {
    if (out.cols() != layer_as[l].rows()) {
      throw DimensionError("layer " + std::to_string(l + 1) +
                           " mixing matrix has " +
                           std::to_string(layer_as[l].rows()) +
                           " rows, expected " + std::to_string(out.cols()));
    }
    out = out * layer_as[l];
  }
  return out;
}

UnmixResult run_mlnmf(const SpectralCube& x, const MlnmfConfig& cfg) {
  cfg.validate();
  const Index max_p = std::min(x.bands(), x.pixels());
  if (cfg.p > max_p) {
    throw ConfigError("p = " + std::to_string(cfg.p) +
                      " exceeds min(bands, pixels) = " + std::to_string(max_p));
  }

  UnmixResult result;
  result.config = cfg;
  result.per_layer.reserve(static_cast<std::size_t>(cfg.layers));

  const Index p = cfg.p;
  const Index n = x.pixels();
  InitResult init =
      cfg.init == InitMode::Vca
          ? vca_endmembers(x.data(), cfg.p, layer_seed(cfg.seed, 1))
          : random_init(x.bands(), p, n, layer_seed(cfg.seed, 1));
  result.vca_indices = init.selected_pixel_indices;
  if (cfg.fcls_start) {
    // Strictly positive so no entry is locked at zero by the updates.
    init.s0 = fcls_abundances(x.data(), init.a0, cfg.layer.delta)
                  .cwiseMax(kPowerFloor);
  }

  result.per_layer.push_back(
      run_layer(x.data(), std::move(init.a0), std::move(init.s0), cfg.layer, 1));

  for (int l = 2; l <= cfg.layers; ++l) {
    const Matrix& input = result.per_layer.back().s;
    InitResult r = cfg.deep_init == DeepInit::Warm
                       ? warm_init(input, cfg.warm_mix, layer_seed(cfg.seed, l))
                       : random_init(p, p, n, layer_seed(cfg.seed, l));
    LayerConfig lc = cfg.layer;
    lc.delta = layer_delta(cfg, x.data(), input, l);
    result.per_layer.push_back(
        run_layer(input, std::move(r.a0), std::move(r.s0), lc, l));
  }

  std::vector<Matrix> as;
  as.reserve(result.per_layer.size());
  for (const LayerResult& lr : result.per_layer) as.push_back(lr.a);
  result.a = compose_signatures(as);
  result.s = result.per_layer.back().s;
  return result;
}

}  // namespace mlunmix
