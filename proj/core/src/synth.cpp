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

#include "mlunmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mlunmix/rng.hpp"

namespace mlunmix {

namespace {

// Symmetric reflection: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
Index reflect(Index i, Index n) {
  const Index period = 2 * n;
  Index m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> linspace(double lo, double hi, Index count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo
                   : lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace

void SpectralLibrary::validate() const {
  if (signatures.cols() < 1 || signatures.rows() < 1) {
    throw DataError("spectral library is empty");
  }
  require_nonnegative(signatures, "spectral library");
  if (!names.empty() && static_cast<Index>(names.size()) != signatures.cols()) {
    throw DataError("library name count differs from signature count");
  }
  if (!wavelengths_nm.empty() &&
      static_cast<Index>(wavelengths_nm.size()) != signatures.rows()) {
    throw DataError("library wavelength count differs from band count");
  }
}

SpectralLibrary make_gaussian_library(Index bands, Index count,
                                      std::uint64_t seed) {
  if (bands < 1 || count < 1) throw ConfigError("library needs bands, count >= 1");
  SpectralLibrary lib;
  lib.wavelengths_nm = linspace(380.0, 2500.0, bands);
  lib.signatures.resize(bands, count);
  Rng rng(seed);
  constexpr double kLo = 380.0, kHi = 2500.0;
  for (Index k = 0; k < count; ++k) {
    // Broad continuum: a level plus two wide Gaussian swells or dips.
    const double level = 0.25 + 0.35 * rng.uniform01();
    double swell_amp[2], swell_center[2], swell_width[2];
    for (int g = 0; g < 2; ++g) {
      swell_amp[g] = -0.15 + 0.35 * rng.uniform01();
      swell_center[g] = kLo + (kHi - kLo) * rng.uniform01();
      swell_width[g] = 300.0 + 600.0 * rng.uniform01();
    }
    // Narrow absorption bands.
    const int bands_n = 2 + static_cast<int>(rng.below(4));
    std::vector<double> depth(bands_n), center(bands_n), width(bands_n);
    for (int g = 0; g < bands_n; ++g) {
      depth[g] = 0.03 + 0.22 * rng.uniform01();
      center[g] = kLo + (kHi - kLo) * rng.uniform01();
      width[g] = 15.0 + 85.0 * rng.uniform01();
    }
    for (Index b = 0; b < bands; ++b) {
      const double w = lib.wavelengths_nm[static_cast<std::size_t>(b)];
      double r = level;
      for (int g = 0; g < 2; ++g) {
        const double z = (w - swell_center[g]) / swell_width[g];
        r += swell_amp[g] * std::exp(-0.5 * z * z);
      }
      for (int g = 0; g < bands_n; ++g) {
        const double z = (w - center[g]) / width[g];
        r -= depth[g] * std::exp(-0.5 * z * z);
      }
      lib.signatures(b, k) = std::max(r, 0.01);
    }
    const double peak = lib.signatures.col(k).maxCoeff();
    if (peak > 0.95) lib.signatures.col(k) *= 0.95 / peak;
    char name[32];
    std::snprintf(name, sizeof(name), "gauss_%02d", static_cast<int>(k));
    lib.names.emplace_back(name);
  }
  return lib;
}

SpectralLibrary default_test_library() {
  return make_gaussian_library(224, 12, 20140801);
}

void SceneSpec::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("image size must be positive");
  if (block_size < 1 || rows % block_size != 0 || cols % block_size != 0) {
    throw ConfigError("block size must divide both image dimensions");
  }
  if (filter_size < 1 || filter_size % 2 == 0) {
    throw ConfigError("filter size must be odd and positive");
  }
  if (!(purity_threshold > 0.0 && purity_threshold <= 1.0)) {
    throw ConfigError("purity threshold must lie in (0, 1]");
  }
  if (p < 1) throw ConfigError("p must be >= 1");
  if (purity_threshold < 1.0 / p) {
    throw ConfigError("purity threshold below 1/p cannot be met");
  }
}

Matrix box_filter(const Matrix& plane, Index size) {
  if (size < 1 || size % 2 == 0) throw ConfigError("filter size must be odd");
  const Index rows = plane.rows(), cols = plane.cols();
  const Index half = size / 2;
  const double scale = 1.0 / static_cast<double>(size);
  Matrix horiz(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Index k = -half; k <= half; ++k) acc += plane(r, reflect(c + k, cols));
      horiz(r, c) = acc * scale;
    }
  }
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Index k = -half; k <= half; ++k) acc += horiz(reflect(r + k, rows), c);
      out(r, c) = acc * scale;
    }
  }
  return out;
}

Scene generate_scene(const SpectralLibrary& lib, const SceneSpec& spec) {
  spec.validate();
  lib.validate();
  if (lib.size() < spec.p) {
    throw ConfigError("library has " + std::to_string(lib.size()) +
                      " signatures, scene needs " + std::to_string(spec.p));
  }
  const Index p = spec.p;
  const Index n = spec.pixels();

  Matrix a_true, s_true;
  std::vector<Index> library_indices;
  std::vector<int> block_labels;
  // Partial Fisher-Yates over library columns.
  {
    Rng rng(derive_seed(spec.seed, {1}));
    std::vector<Index> order(static_cast<std::size_t>(lib.size()));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = 0; i < p; ++i) {
      const auto j = i + static_cast<Index>(rng.below(
                             static_cast<std::uint64_t>(lib.size() - i)));
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(j)]);
    }
    library_indices.assign(order.begin(), order.begin() + p);
  }
  a_true.resize(lib.bands(), p);
  for (Index k = 0; k < p; ++k) {
    a_true.col(k) =
        lib.signatures.col(library_indices[static_cast<std::size_t>(k)]);
  }

  const Index brows = spec.rows / spec.block_size;
  const Index bcols = spec.cols / spec.block_size;
  {
    Rng rng(derive_seed(spec.seed, {2}));
    block_labels.resize(static_cast<std::size_t>(brows * bcols));
    for (int& label : block_labels) {
      label = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    }
  }

  s_true.resize(p, n);
  for (Index k = 0; k < p; ++k) {
    Matrix plane = Matrix::Zero(spec.rows, spec.cols);
    for (Index r = 0; r < spec.rows; ++r) {
      for (Index c = 0; c < spec.cols; ++c) {
        const Index block = (r / spec.block_size) * bcols + c / spec.block_size;
        if (block_labels[static_cast<std::size_t>(block)] == k) plane(r, c) = 1.0;
      }
    }
    if (spec.filter_size > 1) plane = box_filter(plane, spec.filter_size);
    for (Index r = 0; r < spec.rows; ++r)
      for (Index c = 0; c < spec.cols; ++c) s_true(k, r * spec.cols + c) = plane(r, c);
  }

  for (Index j = 0; j < n; ++j) {
    auto col = s_true.col(j);
    col /= col.sum();
    if (col.maxCoeff() > spec.purity_threshold) {
      col.setConstant(1.0 / static_cast<double>(p));
    }
  }

  SpectralCube clean(a_true * s_true, SpatialDims{spec.rows, spec.cols},
                     lib.wavelengths_nm);
  return Scene{std::move(a_true), std::move(s_true), std::move(clean),
               std::move(library_indices), std::move(block_labels)};
}

double noise_sigma(const Matrix& clean, double snr_db) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw DomainError("SNR must be a number or +inf");
  }
  if (snr_db == kNoNoise) return 0.0;
  const double signal = clean.squaredNorm() / static_cast<double>(clean.cols());
  return std::sqrt(signal / (static_cast<double>(clean.rows()) *
                             std::pow(10.0, snr_db / 10.0)));
}

NoisyCube add_noise(const SpectralCube& clean, double snr_db,
                    std::uint64_t seed, bool clamp) {
  const double sigma = noise_sigma(clean.data(), snr_db);
  NoiseField noise{Matrix::Zero(clean.bands(), clean.pixels()), sigma};
  if (sigma == 0.0) return NoisyCube{clean, std::move(noise)};

  Rng rng(seed);
  for (Index j = 0; j < noise.data.cols(); ++j)
    for (Index i = 0; i < noise.data.rows(); ++i) noise.data(i, j) = sigma * rng.normal();
  Matrix observed = clean.data() + noise.data;
  if (clamp) observed = observed.cwiseMax(0.0);
  return NoisyCube{SpectralCube(std::move(observed), clean.spatial_dims(),
                                clean.wavelengths_nm()),
                   std::move(noise)};
}

double measured_snr_db(const Matrix& clean, const Matrix& noise) {
  return 10.0 * std::log10(clean.squaredNorm() / noise.squaredNorm());
}

GroundTruth make_ground_truth(const SpectralLibrary& lib, const SceneSpec& spec,
                              double snr_db, std::uint64_t noise_seed) {
  Scene scene = generate_scene(lib, spec);
  NoisyCube noisy = add_noise(scene.clean, snr_db, noise_seed);
  return GroundTruth{std::move(scene.a_true),
                     std::move(scene.s_true),
                     std::move(scene.clean),
                     std::move(noisy.noisy),
                     noisy.noise.sigma,
                     snr_db,
                     std::move(scene.library_indices)};
}

}  // namespace mlunmix
