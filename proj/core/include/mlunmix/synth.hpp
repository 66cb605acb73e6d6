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

// Synthetic scenes with known ground truth.
//
// Scene recipe: pick P library signatures, fill square blocks of the image
// with one endmember each, blur every abundance plane with a box filter
// (symmetric reflection at the borders), renormalize, and replace any pixel
// whose largest abundance exceeds the purity threshold with the uniform
// mixture 1/P. Gaussian noise is then added at a requested SNR, where the
// per-element variance is sigma^2 = E[x^T x] / (B 10^(SNR/10)) and E[x^T x]
// is the mean squared norm of a pixel spectrum.

#ifndef MLUNMIX_SYNTH_HPP_
#define MLUNMIX_SYNTH_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mlunmix/types.hpp"

namespace mlunmix {

struct SpectralLibrary {
  Matrix signatures;  // B x K
  std::vector<std::string> names;
  std::vector<double> wavelengths_nm;

  Index bands() const { return signatures.rows(); }
  Index size() const { return signatures.cols(); }
  void validate() const;
};

// Smooth nonnegative spectra sampled on `bands` wavelengths spanning
// 380-2500 nm: a reflectance level with two broad Gaussian swells, minus a
// few narrow Gaussian absorption bands.
SpectralLibrary make_gaussian_library(Index bands, Index count,
                                      std::uint64_t seed);

// The library shipped as data/test_library.txt (224 bands, 12 spectra).
SpectralLibrary default_test_library();

struct SceneSpec {
  Index rows = 64;
  Index cols = 64;
  Index block_size = 8;
  Index filter_size = 9;
  double purity_threshold = 0.8;
  int p = 6;
  std::uint64_t seed = 0;

  Index pixels() const { return rows * cols; }
  void validate() const;
};

struct Scene {
  Matrix a_true;  // B x P, verbatim library columns
  Matrix s_true;  // P x N, columns sum to one
  SpectralCube clean;
  std::vector<Index> library_indices;
  std::vector<int> block_labels;  // endmember per block, row-major blocks
};

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct NoisyCube {
  SpectralCube noisy;
  NoiseField noise;  // before clamping
};

struct GroundTruth {
  Matrix a_true;
  Matrix s_true;
  SpectralCube clean_cube;
  SpectralCube noisy_cube;
  double sigma = 0.0;
  double snr_db = kNoNoise;
  std::vector<Index> library_indices;
};

// Box (mean) filter of odd `size` over a rows x cols plane with symmetric
// reflection (edge sample repeated) outside the image.
Matrix box_filter(const Matrix& plane, Index size);

Scene generate_scene(const SpectralLibrary& lib, const SceneSpec& spec);

// Per-element noise standard deviation for the given clean data and SNR.
double noise_sigma(const Matrix& clean, double snr_db);

// Adds i.i.d. N(0, sigma^2) noise. snr_db = +inf returns the clean cube
// unchanged. With `clamp`, negative observations are set to zero; without
// it they raise DomainError, since a cube must stay nonnegative. The
// returned noise field is always the pre-clamp draw.
NoisyCube add_noise(const SpectralCube& clean, double snr_db,
                    std::uint64_t seed, bool clamp = true);

// 10 log10(||clean||^2 / ||noise||^2).
double measured_snr_db(const Matrix& clean, const Matrix& noise);

GroundTruth make_ground_truth(const SpectralLibrary& lib, const SceneSpec& spec,
                              double snr_db, std::uint64_t noise_seed);

}  // namespace mlunmix

#endif  // MLUNMIX_SYNTH_HPP_
