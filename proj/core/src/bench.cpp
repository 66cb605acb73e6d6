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

#include "mlunmix/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mlunmix/init.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/rng.hpp"

namespace mlunmix {

namespace {

constexpr std::uint64_t kSceneRole = 0x5343454e45ULL;
constexpr std::uint64_t kNoiseRole = 0x4e4f495345ULL;
constexpr std::uint64_t kMethodRole = 0x4d4554484fULL;

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  try {
    return parse_double(text);
  } catch (const DataError&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" +
                      std::string(text) + "'");
  }
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" +
                    std::string(text) + "'");
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats mean_and_std(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::Mlnmf:
      return "mlnmf";
    case Method::Slnmf:
      return "slnmf";
    case Method::VcaFcls:
      return "vca_fcls";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  name = trim(name);
  if (name == "mlnmf") return Method::Mlnmf;
  if (name == "slnmf") return Method::Slnmf;
  if (name == "vca_fcls") return Method::VcaFcls;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string format_snr(double snr_db) {
  return snr_db == kNoNoise ? "inf" : format_double(snr_db);
}

double parse_snr(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf" || text == "none") return kNoNoise;
  const double v = parse_real("snr", text);
  if (!std::isfinite(v)) throw ConfigError("snr must be finite or 'inf'");
  return v;
}

void ExperimentConfig::validate() const {
  scene.validate();
  mlnmf.validate();
  if (scene.p != mlnmf.p) throw ConfigError("scene and unmixing p differ");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (snr_grid.empty()) throw ConfigError("snr_grid must not be empty");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "size") {
    const auto parts = split(value, 'x');
    if (parts.size() == 1) {
      cfg.scene.rows = cfg.scene.cols = parse_integer<Index>(key, parts[0]);
    } else if (parts.size() == 2) {
      cfg.scene.rows = parse_integer<Index>(key, parts[0]);
      cfg.scene.cols = parse_integer<Index>(key, parts[1]);
    } else {
      throw ConfigError("size: expected N or RxC");
    }
  } else if (key == "block") {
    cfg.scene.block_size = parse_integer<Index>(key, value);
  } else if (key == "filter") {
    cfg.scene.filter_size = parse_integer<Index>(key, value);
  } else if (key == "purity") {
    cfg.scene.purity_threshold = parse_real(key, value);
  } else if (key == "p") {
    cfg.scene.p = cfg.mlnmf.p = parse_integer<int>(key, value);
  } else if (key == "layers") {
    cfg.mlnmf.layers = parse_integer<int>(key, value);
  } else if (key == "alpha0") {
    cfg.mlnmf.layer.alpha0 = parse_real(key, value);
  } else if (key == "tau") {
    cfg.mlnmf.layer.tau = parse_real(key, value);
  } else if (key == "alpha_s_ratio") {
    cfg.mlnmf.layer.alpha_s_ratio = parse_real(key, value);
  } else if (key == "delta") {
    cfg.mlnmf.layer.delta = parse_real(key, value);
  } else if (key == "tmax") {
    cfg.mlnmf.layer.t_max = parse_integer<int>(key, value);
  } else if (key == "eps") {
    cfg.mlnmf.layer.epsilon = parse_real(key, value);
  } else if (key == "patience") {
    cfg.mlnmf.layer.stop_patience = parse_integer<int>(key, value);
  } else if (key == "init") {
    if (value == "vca") {
      cfg.mlnmf.init = InitMode::Vca;
    } else if (value == "random") {
      cfg.mlnmf.init = InitMode::Random;
    } else {
      throw ConfigError("init: expected vca or random");
    }
  } else if (key == "deep_init") {
    cfg.mlnmf.deep_init = parse_deep_init(std::string(value));
  } else if (key == "fcls_start") {
    cfg.mlnmf.fcls_start = parse_bool(key, value);
  } else if (key == "scale_delta") {
    cfg.mlnmf.scale_delta = parse_bool(key, value);
  } else if (key == "warm_mix") {
    cfg.mlnmf.warm_mix = parse_real(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "snr_grid") {
    cfg.snr_grid.clear();
    for (std::string_view s : split(value, ',')) cfg.snr_grid.push_back(parse_snr(s));
  } else if (key == "runs") {
    cfg.runs = parse_integer<int>(key, value);
  } else if (key == "methods") {
    cfg.methods.clear();
    for (std::string_view m : split(value, ',')) cfg.methods.push_back(parse_method(m));
  } else if (key == "output_dir") {
    cfg.output_dir = std::string(value);
  } else if (key == "library") {
    value = trim(value);
    cfg.library = value == "bundled" ? std::filesystem::path() : std::filesystem::path(std::string(value));
  } else if (key == "threads") {
    cfg.threads = parse_integer<int>(key, value);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  KeyValues kv;
  try {
    kv = parse_key_values(text);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [key, value] : kv) apply_setting(cfg, key, value);
  cfg.validate();
  return cfg;
}

KeyValues describe(const ExperimentConfig& cfg) {
  std::string snrs, methods;
  for (double s : cfg.snr_grid) snrs += (snrs.empty() ? "" : ",") + format_snr(s);
  for (Method m : cfg.methods) methods += (methods.empty() ? "" : ",") + std::string(to_string(m));
  const LayerConfig& l = cfg.mlnmf.layer;
  return {
      {"size", std::to_string(cfg.scene.rows) + "x" + std::to_string(cfg.scene.cols)},
      {"block", std::to_string(cfg.scene.block_size)},
      {"filter", std::to_string(cfg.scene.filter_size)},
      {"purity", format_double(cfg.scene.purity_threshold)},
      {"p", std::to_string(cfg.mlnmf.p)},
      {"layers", std::to_string(cfg.mlnmf.layers)},
      {"alpha0", format_double(l.alpha0)},
      {"tau", format_double(l.tau)},
      {"alpha_s_ratio", format_double(l.alpha_s_ratio)},
      {"delta", format_double(l.delta)},
      {"tmax", std::to_string(l.t_max)},
      {"eps", format_double(l.epsilon)},
      {"patience", std::to_string(l.stop_patience)},
      {"init", to_string(cfg.mlnmf.init)},
      {"deep_init", to_string(cfg.mlnmf.deep_init)},
      {"fcls_start", cfg.mlnmf.fcls_start ? "true" : "false"},
      {"scale_delta", cfg.mlnmf.scale_delta ? "true" : "false"},
      {"warm_mix", format_double(cfg.mlnmf.warm_mix)},
      {"seed", std::to_string(cfg.seed)},
      {"snr_grid", snrs},
      {"runs", std::to_string(cfg.runs)},
      {"methods", methods},
      {"library", cfg.library.empty() ? "bundled" : cfg.library.string()},
  };
}

UnmixResult run_method(Method method, const SpectralCube& cube, const MlnmfConfig& cfg) {
  switch (method) {
    case Method::Mlnmf:
      return run_mlnmf(cube, cfg);
    case Method::Slnmf: {
      MlnmfConfig single = cfg;
      single.layers = 1;
      single.layer.penalize_signatures = false;
      return run_mlnmf(cube, single);
    }
    case Method::VcaFcls: {
      cfg.validate();
      InitResult init = vca_endmembers(cube.data(), cfg.p, layer_seed(cfg.seed, 1));
      UnmixResult out;
      out.config = cfg;
      out.vca_indices = init.selected_pixel_indices;
      out.s = fcls_abundances(cube.data(), init.a0, cfg.layer.delta);
      out.a = std::move(init.a0);
      return out;
    }
  }
  throw ConfigError("unknown method");
}

CellSeeds cell_seeds(std::uint64_t master, int run, double snr_db) {
  const auto r = static_cast<std::uint64_t>(run);
  const auto bits = std::bit_cast<std::uint64_t>(snr_db);
  return CellSeeds{derive_seed(master, {kSceneRole, r}),
                   derive_seed(master, {kNoiseRole, r, bits}),
                   derive_seed(master, {kMethodRole, r, bits})};
}

double BenchReport::failed_fraction() const {
  if (cells.empty()) return 0.0;
  const auto failed = std::count_if(cells.begin(), cells.end(),
                                    [](const CellResult& c) { return !c.ok; });
  return static_cast<double>(failed) / static_cast<double>(cells.size());
}

BenchReport run_bench(const ExperimentConfig& cfg, const SpectralLibrary& lib,
                      const ProgressFn& progress) {
  cfg.validate();
  const std::size_t n_snr = cfg.snr_grid.size();
  const std::size_t n_runs = static_cast<std::size_t>(cfg.runs);
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t units = n_snr * n_runs;

  BenchReport report;
  report.cells.resize(units * n_methods);

  std::mutex progress_mutex;
  auto run_unit = [&](std::size_t unit) {
    const std::size_t si = unit / n_runs;
    const int run = static_cast<int>(unit % n_runs);
    const double snr = cfg.snr_grid[si];
    const CellSeeds seeds = cell_seeds(cfg.seed, run, snr);

    std::optional<GroundTruth> truth;
    std::string setup_error;
    try {
      SceneSpec spec = cfg.scene;
      spec.seed = seeds.scene;
      truth = make_ground_truth(lib, spec, snr, seeds.noise);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      CellResult& cell = report.cells[unit * n_methods + mi];
      cell.snr_db = snr;
      cell.run = run;
      cell.method = cfg.methods[mi];
      cell.seeds = seeds;
      if (!truth) {
        cell.error = setup_error;
      } else {
        cell.sigma = truth->sigma;
        try {
          MlnmfConfig mc = cfg.mlnmf;
          mc.seed = seeds.method;
          const UnmixResult result = run_method(cell.method, truth->noisy_cube, mc);
          const EvalReport eval = evaluate(*truth, result);
          cell.rms_sad = eval.rms_sad;
          cell.rms_aad = eval.rms_aad;
          cell.excluded_pixels = eval.excluded_pixels;
          for (const LayerResult& lr : result.per_layer) cell.iterations += lr.iterations_run;
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(cell);
      }
    }
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : static_cast<unsigned>(cfg.threads);
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, units));
  if (threads <= 1) {
    for (std::size_t u = 0; u < units; ++u) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t u = next++; u < units; u = next++) run_unit(u);
      });
    }
  }

  report.aggregate = aggregate_cells(report.cells, cfg.methods, cfg.snr_grid);
  return report;
}

std::vector<AggregateRow> aggregate_cells(const std::vector<CellResult>& cells,
                                          const std::vector<Method>& methods,
                                          const std::vector<double>& snr_grid) {
  std::vector<AggregateRow> rows;
  rows.reserve(methods.size() * snr_grid.size());
  for (Method m : methods) {
    for (double snr : snr_grid) {
      AggregateRow row;
      row.method = m;
      row.snr_db = snr;
      std::vector<double> sads, aads;
      for (const CellResult& c : cells) {
        if (c.method != m || std::bit_cast<std::uint64_t>(c.snr_db) !=
                                 std::bit_cast<std::uint64_t>(snr)) {
          continue;
        }
        if (!c.ok) {
          ++row.failed_runs;
          continue;
        }
        ++row.ok_runs;
        sads.push_back(c.rms_sad);
        aads.push_back(c.rms_aad);
      }
      const Stats s = mean_and_std(sads);
      const Stats a = mean_and_std(aads);
      row.mean_rms_sad = s.mean;
      row.std_rms_sad = s.stddev;
      row.mean_rms_aad = a.mean;
      row.std_rms_aad = a.stddev;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_raw_csv(const std::vector<CellResult>& cells) {
  std::string out =
      "snr_db,run,method,status,rms_sad,rms_aad,excluded_pixels,iterations,"
      "sigma,scene_seed,noise_seed,method_seed,error\n";
  for (const CellResult& c : cells) {
    out += format_snr(c.snr_db) + "," + std::to_string(c.run) + "," +
           to_string(c.method) + "," + (c.ok ? "ok" : "failed") + "," +
           format_double(c.rms_sad) + "," + format_double(c.rms_aad) + "," +
           std::to_string(c.excluded_pixels) + "," + std::to_string(c.iterations) +
           "," + format_double(c.sigma) + "," + std::to_string(c.seeds.scene) + "," +
           std::to_string(c.seeds.noise) + "," + std::to_string(c.seeds.method) +
           "," + sanitize(c.error) + "\n";
  }
  return out;
}

std::vector<CellResult> parse_raw_csv(std::string_view text) {
  std::vector<CellResult> cells;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 13) throw DataError("raw.csv row has " + std::to_string(f.size()) + " fields");
    CellResult c;
    c.snr_db = parse_snr(f[0]);
    c.run = parse_integer<int>("run", f[1]);
    c.method = parse_method(f[2]);
    c.ok = trim(f[3]) == "ok";
    c.rms_sad = parse_double(f[4]);
    c.rms_aad = parse_double(f[5]);
    c.excluded_pixels = parse_integer<Index>("excluded_pixels", f[6]);
    c.iterations = parse_integer<int>("iterations", f[7]);
    c.sigma = parse_double(f[8]);
    c.seeds.scene = parse_integer<std::uint64_t>("scene_seed", f[9]);
    c.seeds.noise = parse_integer<std::uint64_t>("noise_seed", f[10]);
    c.seeds.method = parse_integer<std::uint64_t>("method_seed", f[11]);
    c.error = std::string(f[12]);
    cells.push_back(std::move(c));
  }
  return cells;
}

std::string format_aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "method,snr_db,ok_runs,failed_runs,mean_rms_sad,std_rms_sad,"
      "mean_rms_aad,std_rms_aad\n";
  for (const AggregateRow& r : rows) {
    out += std::string(to_string(r.method)) + "," + format_snr(r.snr_db) + "," +
           std::to_string(r.ok_runs) + "," + std::to_string(r.failed_runs) + "," +
           format_double(r.mean_rms_sad) + "," + format_double(r.std_rms_sad) + "," +
           format_double(r.mean_rms_aad) + "," + format_double(r.std_rms_aad) + "\n";
  }
  return out;
}

void write_bench_outputs(const ExperimentConfig& cfg, const BenchReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw DataError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  }
  write_file_atomic(cfg.output_dir / "raw.csv", format_raw_csv(report.cells));
  write_file_atomic(cfg.output_dir / "aggregate.csv", format_aggregate_csv(report.aggregate));
  write_file_atomic(cfg.output_dir / "config.txt", format_key_values(describe(cfg)));
}

}  // namespace mlunmix
