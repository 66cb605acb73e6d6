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


#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlunmix/bench.hpp"
#include "mlunmix/io.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/mlnmf.hpp"
#include "mlunmix/rng.hpp"
#include "mlunmix/synth.hpp"

namespace mlunmix::cli {

namespace {

namespace fs = std::filesystem;

// Noise stream for `synth`; generate_scene uses streams 1 and 2.
constexpr std::uint64_t kSynthNoiseStream = 3;

std::string join(const std::vector<Index>& v) {
  std::string out;
  for (Index i : v) out += (out.empty() ? "" : ",") + std::to_string(i);
  return out;
}

std::string layer_file(int layer, const char* what) {
  char name[48];
  std::snprintf(name, sizeof(name), "layer_%02d_%s.txt", layer, what);
  return name;
}

SpectralLibrary load_library(const std::string& path) {
  if (path.empty() || path == "bundled") return default_test_library();
  return read_library(path);
}

// Flag values kept as text and fed through apply_setting, so the CLI and
// config files share one parser.
using Settings = std::map<std::string, std::string>;

void add_setting(CLI::App* app, Settings& settings, const std::string& flag,
                 const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + flag, [&settings, key](const std::string& v) { settings[key] = v; }, help);
}

struct SynthArgs {
  Settings settings;
  std::string snr = "20";
  std::uint64_t seed = 0;
  std::string library;
  std::string out;
};

int do_synth(const SynthArgs& args, std::ostream& out) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : args.settings) apply_setting(cfg, k, v);
  SceneSpec spec = cfg.scene;
  spec.seed = args.seed;
  spec.validate();
  const double snr = parse_snr(args.snr);
  const SpectralLibrary lib = load_library(args.library);

  const Scene scene = generate_scene(lib, spec);
  const std::uint64_t noise_seed = derive_seed(args.seed, {kSynthNoiseStream});
  const NoisyCube noisy = add_noise(scene.clean, snr, noise_seed);

  const fs::path dir = args.out;
  fs::create_directories(dir);
  write_matrix(dir / "clean.txt", scene.clean.data());
  write_matrix(dir / "noisy.txt", noisy.noisy.data());
  write_matrix(dir / "a_true.txt", scene.a_true);
  write_matrix(dir / "s_true.txt", scene.s_true);
  const double measured =
      noisy.noise.sigma == 0.0 ? kNoNoise
                               : measured_snr_db(scene.clean.data(), noisy.noise.data);
  KeyValues manifest = {
      {"command", "synth"},
      {"rows", std::to_string(spec.rows)},
      {"cols", std::to_string(spec.cols)},
      {"bands", std::to_string(lib.bands())},
      {"p", std::to_string(spec.p)},
      {"block", std::to_string(spec.block_size)},
      {"filter", std::to_string(spec.filter_size)},
      {"purity", format_double(spec.purity_threshold)},
      {"snr_db", format_snr(snr)},
      {"seed", std::to_string(args.seed)},
      {"noise_seed", std::to_string(noise_seed)},
      {"library", args.library.empty() ? "bundled" : args.library},
      {"library_indices", join(scene.library_indices)},
      {"sigma", format_double(noisy.noise.sigma)},
      {"measured_snr_db", format_snr(measured)},
  };
  write_file_atomic(dir / "manifest.txt", format_key_values(manifest));
  out << "wrote " << dir.string() << " (" << lib.bands() << " x " << spec.pixels()
      << ", sigma " << format_double(noisy.noise.sigma) << ")\n";
  return kExitOk;
}

struct UnmixArgs {
  Settings settings;
  std::string input;
  std::string dims;
  std::string out;
};

int do_unmix(const UnmixArgs& args, std::ostream& out) {
  ExperimentConfig ec;
  for (const auto& [k, v] : args.settings) apply_setting(ec, k, v);
  MlnmfConfig cfg = ec.mlnmf;
  cfg.seed = ec.seed;
  cfg.validate();

  std::optional<SpatialDims> dims;
  if (!args.dims.empty()) {
    ExperimentConfig tmp;
    apply_setting(tmp, "size", args.dims);
    dims = SpatialDims{tmp.scene.rows, tmp.scene.cols};
  }
  SpectralCube cube(read_matrix(args.input), dims);

  const UnmixResult result = run_mlnmf(cube, cfg);

  const fs::path dir = args.out;
  fs::create_directories(dir);
  write_matrix(dir / "a.txt", result.a);
  write_matrix(dir / "s.txt", result.s);
  KeyValues manifest = {{"command", "unmix"},
                        {"input", args.input},
                        {"bands", std::to_string(cube.bands())},
                        {"pixels", std::to_string(cube.pixels())}};
  for (const auto& kv : describe(ec)) {
    static const char* const kKeys[] = {"p", "layers", "alpha0", "tau", "alpha_s_ratio",
                                        "delta", "tmax", "eps", "patience", "init",
                                        "deep_init", "fcls_start", "scale_delta",
                                        "warm_mix", "seed"};
    for (const char* k : kKeys)
      if (kv.first == k) manifest.push_back(kv);
  }
  manifest.emplace_back("vca_indices", join(result.vca_indices));
  for (std::size_t l = 0; l < result.per_layer.size(); ++l) {
    const LayerResult& lr = result.per_layer[l];
    const int layer = static_cast<int>(l) + 1;
    write_matrix(dir / layer_file(layer, "a"), lr.a);
    Matrix trace(static_cast<Index>(lr.cost_trace.size()), 1);
    for (std::size_t t = 0; t < lr.cost_trace.size(); ++t) {
      trace(static_cast<Index>(t), 0) = lr.cost_trace[t];
    }
    write_matrix(dir / layer_file(layer, "cost"), trace);
    const std::string prefix = "layer_" + std::to_string(layer) + "_";
    manifest.emplace_back(prefix + "iterations", std::to_string(lr.iterations_run));
    manifest.emplace_back(prefix + "stop", to_string(lr.stop_reason));
    if (!lr.cost_trace.empty()) {
      manifest.emplace_back(prefix + "final_cost", format_double(lr.cost_trace.back()));
    }
  }
  const double rel = (cube.data() - result.a * result.s).norm() / cube.data().norm();
  manifest.emplace_back("relative_reconstruction_error", format_double(rel));
  write_file_atomic(dir / "manifest.txt", format_key_values(manifest));
  out << "unmixed " << cube.bands() << " x " << cube.pixels() << " into P=" << cfg.p
      << " over " << result.per_layer.size() << " layer(s); relative error "
      << format_double(rel) << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string a_true, s_true, a_est, s_est, out;
};

std::string format_eval_report(const EvalReport& r) {
  std::string text = "quantity,index,value\n";
  for (std::size_t k = 0; k < r.per_endmember_sad.size(); ++k) {
    text += "sad," + std::to_string(k) + "," + format_double(r.per_endmember_sad[k]) + "\n";
  }
  for (std::size_t e = 0; e < r.assignment.size(); ++e) {
    text += "match," + std::to_string(e) + "," + std::to_string(r.assignment[e]) + "\n";
  }
  text += "rms_sad,," + format_double(r.rms_sad) + "\n";
  text += "rms_aad,," + format_double(r.rms_aad) + "\n";
  text += "excluded_pixels,," + std::to_string(r.excluded_pixels) + "\n";
  return text;
}

int do_eval(const EvalArgs& args, std::ostream& out) {
  const EvalReport report = evaluate(read_matrix(args.a_true), read_matrix(args.s_true),
                                     read_matrix(args.a_est), read_matrix(args.s_est));
  const std::string text = format_eval_report(report);
  if (args.out.empty()) {
    out << text;
  } else {
    write_file_atomic(args.out, text);
  }
  return kExitOk;
}

struct BenchArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::optional<int> threads;
  bool quiet = false;
};

int do_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (!args.config.empty()) {
    const std::string text = read_text_file(args.config);
    KeyValues kv;
    try {
      kv = parse_key_values(text);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
  }
  for (const std::string& s : args.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, trim(std::string_view(s).substr(0, eq)),
                  std::string_view(s).substr(eq + 1));
  }
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.threads) cfg.threads = *args.threads;
  cfg.validate();
  const SpectralLibrary lib = load_library(cfg.library.string());

  ProgressFn progress;
  if (!args.quiet) {
    progress = [&err](const CellResult& c) {
      err << "snr=" << format_snr(c.snr_db) << " run=" << c.run << " " << to_string(c.method);
      if (c.ok) {
        err << " rmsSAD=" << c.rms_sad << " rmsAAD=" << c.rms_aad << "\n";
      } else {
        err << " FAILED: " << c.error << "\n";
      }
    };
  }
  const BenchReport report = run_bench(cfg, lib, progress);
  write_bench_outputs(cfg, report);
  out << format_aggregate_csv(report.aggregate);
  if (report.failed_fraction() > 0.1) {
    err << "error: " << report.failed_fraction() * 100.0 << "% of cells failed\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilayer sparse NMF hyperspectral unmixing toolkit", "mlunmix"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic mixed scene");
  add_setting(synth, synth_args.settings, "size", "size", "Image size, N or RxC (default 64)");
  add_setting(synth, synth_args.settings, "block", "block", "Block side in pixels (default 8)");
  add_setting(synth, synth_args.settings, "filter", "filter", "Odd box filter size (default 9)");
  add_setting(synth, synth_args.settings, "purity", "purity", "Purity threshold (default 0.8)");
  add_setting(synth, synth_args.settings, "p", "p", "Number of endmembers (default 6)");
  synth->add_option("--snr", synth_args.snr, "SNR in dB or 'inf'")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Scene seed")->capture_default_str();
  synth->add_option("--library", synth_args.library, "Library file (default: bundled)");
  synth->add_option("--out", synth_args.out, "Output directory")->required();

  UnmixArgs unmix_args;
  CLI::App* unmix = app.add_subcommand("unmix", "Run multilayer NMF on a cube file");
  unmix->add_option("--input", unmix_args.input, "Cube matrix file, bands x pixels")->required();
  unmix->add_option("--dims", unmix_args.dims, "Spatial size RxC (optional)");
  unmix->add_option("--out", unmix_args.out, "Output directory")->required();
  Settings& us = unmix_args.settings;
  add_setting(unmix, us, "p", "p", "Number of endmembers (default 6)");
  add_setting(unmix, us, "layers", "layers", "Number of layers (default 10)");
  add_setting(unmix, us, "alpha0", "alpha0", "Initial sparsity weight (default 0.1)");
  add_setting(unmix, us, "tau", "tau", "Annealing time constant (default 25)");
  add_setting(unmix, us, "delta", "delta", "Sum-to-one weight, 0 disables (default 25)");
  add_setting(unmix, us, "tmax", "tmax", "Iterations per layer (default 400)");
  add_setting(unmix, us, "eps", "eps", "Cost change stop tolerance (default 1e-4)");
  add_setting(unmix, us, "alpha-s-ratio", "alpha_s_ratio", "alpha_S / alpha_A (default 2)");
  add_setting(unmix, us, "patience", "patience", "Consecutive small changes to stop (default 10)");
  add_setting(unmix, us, "init", "init", "Layer-1 init: vca or random (default vca)");
  add_setting(unmix, us, "deep-init", "deep_init", "Deeper layers: warm or random (default warm)");
  add_setting(unmix, us, "fcls-start", "fcls_start", "FCLS start for layer-1 S (default true)");
  add_setting(unmix, us, "scale-delta", "scale_delta", "Rescale delta per layer (default true)");
  add_setting(unmix, us, "warm-mix", "warm_mix", "Off-diagonal weight of warm A (default 0.1)");
  add_setting(unmix, us, "seed", "seed", "Initialization seed (default 0)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score estimated factors against the truth");
  eval->add_option("--a-true", eval_args.a_true, "True signatures")->required();
  eval->add_option("--s-true", eval_args.s_true, "True abundances")->required();
  eval->add_option("--a-est", eval_args.a_est, "Estimated signatures")->required();
  eval->add_option("--s-est", eval_args.s_est, "Estimated abundances")->required();
  eval->add_option("--out", eval_args.out, "Report file (default: stdout)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo benchmark over SNR, runs and methods");
  bench->add_option("--config", bench_args.config, "key=value experiment file");
  bench->add_option("--set", bench_args.sets, "Override one key=value setting")
      ->allow_extra_args(false);
  bench->add_option("--out", bench_args.out, "Output directory (overrides output_dir)");
  bench->add_option("--threads", bench_args.threads, "Worker threads, 0 = all cores");
  bench->add_flag("--quiet", bench_args.quiet, "No per-cell progress");

  std::string library_out;
  CLI::App* library = app.add_subcommand("library", "Write the bundled test library");
  library->add_option("--out", library_out, "Library file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return do_synth(synth_args, out);
    if (unmix->parsed()) return do_unmix(unmix_args, out);
    if (eval->parsed()) return do_eval(eval_args, out);
    if (bench->parsed()) return do_bench(bench_args, out, err);
    if (library->parsed()) {
      write_library(library_out, default_test_library());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverDivergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mlunmix::cli
