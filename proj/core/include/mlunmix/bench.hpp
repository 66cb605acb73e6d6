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

// Monte-Carlo benchmark harness over (SNR, run, method) cells.
//
// Seeds are split from one master seed by role, run number and the bit
// pattern of the SNR value, never by position in a list:
//   scene  = derive(master, {scene, run})
//   noise  = derive(master, {noise, run, bits(snr)})
//   method = derive(master, {method, run, bits(snr)})
// All methods of one (SNR, run) pair therefore see the same noisy cube and
// the same VCA selection, which makes method comparisons paired.

#ifndef MLUNMIX_BENCH_HPP_
#define MLUNMIX_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mlunmix/io.hpp"
#include "mlunmix/mlnmf.hpp"
#include "mlunmix/synth.hpp"

namespace mlunmix {

enum class Method { Mlnmf, Slnmf, VcaFcls };

const char* to_string(Method method);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  SceneSpec scene;
  MlnmfConfig mlnmf;
  std::vector<double> snr_grid{15.0, 20.0, 25.0, 30.0, kNoNoise};
  int runs = 20;
  std::vector<Method> methods{Method::Mlnmf, Method::Slnmf, Method::VcaFcls};
  std::filesystem::path output_dir = "bench_out";
  std::filesystem::path library;  // empty: bundled test library
  std::uint64_t seed = 0;
  int threads = 1;  // 0: hardware concurrency

  void validate() const;
};

// Sets one `key=value` entry; throws ConfigError for unknown keys or values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
ExperimentConfig parse_experiment_config(std::string_view text);
KeyValues describe(const ExperimentConfig& cfg);

std::string format_snr(double snr_db);
double parse_snr(std::string_view text);

// Runs one unmixing method on a cube. `cfg.seed` drives initialization.
//   mlnmf:    full multilayer factorization
//   slnmf:    one layer, no signature penalty
//   vca_fcls: VCA signatures held fixed, abundances from exact
//             sum-to-one weighted NNLS
UnmixResult run_method(Method method, const SpectralCube& cube, const MlnmfConfig& cfg);

struct CellSeeds {
  std::uint64_t scene;
  std::uint64_t noise;
  std::uint64_t method;
};

CellSeeds cell_seeds(std::uint64_t master, int run, double snr_db);

struct CellResult {
  double snr_db = 0.0;
  int run = 0;
  Method method = Method::Mlnmf;
  bool ok = false;
  double rms_sad = 0.0;
  double rms_aad = 0.0;
  Index excluded_pixels = 0;
  int iterations = 0;  // summed over layers
  double sigma = 0.0;
  CellSeeds seeds{};
  std::string error;
};

struct AggregateRow {
  Method method = Method::Mlnmf;
  double snr_db = 0.0;
  int ok_runs = 0;
  int failed_runs = 0;
  double mean_rms_sad = 0.0;
  double std_rms_sad = 0.0;
  double mean_rms_aad = 0.0;
  double std_rms_aad = 0.0;
};

struct BenchReport {
  std::vector<CellResult> cells;  // ordered by (snr, run, method)
  std::vector<AggregateRow> aggregate;  // ordered by (method, snr)
  double failed_fraction() const;
};

using ProgressFn = std::function<void(const CellResult&)>;

BenchReport run_bench(const ExperimentConfig& cfg, const SpectralLibrary& lib,
                      const ProgressFn& progress = {});

// Mean and sample standard deviation over successful cells, in cell order.
std::vector<AggregateRow> aggregate_cells(const std::vector<CellResult>& cells,
                                          const std::vector<Method>& methods,
                                          const std::vector<double>& snr_grid);

std::string format_raw_csv(const std::vector<CellResult>& cells);
std::vector<CellResult> parse_raw_csv(std::string_view text);
std::string format_aggregate_csv(const std::vector<AggregateRow>& rows);

// Writes raw.csv, aggregate.csv and config.txt into cfg.output_dir.
void write_bench_outputs(const ExperimentConfig& cfg, const BenchReport& report);

}  // namespace mlunmix

#endif  // MLUNMIX_BENCH_HPP_
