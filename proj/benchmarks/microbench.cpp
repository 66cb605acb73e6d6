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


#include <benchmark/benchmark.h>

#include <map>

#include "mlunmix/init.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/mlnmf.hpp"
#include "mlunmix/nmf.hpp"
#include "mlunmix/synth.hpp"

namespace mlunmix {
namespace {

// One 224-band cube of side `n` with 6 endmembers at 20 dB, cached per size.
const GroundTruth& scene(Index side) {
  static std::map<Index, GroundTruth> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    SceneSpec spec;
    spec.rows = spec.cols = side;
    spec.block_size = side / 4;
    spec.filter_size = 3;
    it = cache.emplace(side, make_ground_truth(default_test_library(), spec, 20.0, 1)).first;
  }
  return it->second;
}

void BM_UpdateSignatures(benchmark::State& state) {
  const GroundTruth& gt = scene(state.range(0));
  const Matrix& x = gt.noisy_cube.data();
  const InitResult init = vca_endmembers(x, 6, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_signatures(x, init.a0, init.s0, 0.05));
  }
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_UpdateSignatures)->Arg(32)->Arg(64);

void BM_UpdateAbundancesAugmented(benchmark::State& state) {
  const GroundTruth& gt = scene(state.range(0));
  const Matrix& x = gt.noisy_cube.data();
  const InitResult init = vca_endmembers(x, 6, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_abundances_augmented(x, init.a0, init.s0, 0.1, 25.0));
  }
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_UpdateAbundancesAugmented)->Arg(32)->Arg(64);

void BM_FclsAbundances(benchmark::State& state) {
  const GroundTruth& gt = scene(state.range(0));
  const Matrix& x = gt.noisy_cube.data();
  const InitResult init = vca_endmembers(x, 6, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fcls_abundances(x, init.a0, 25.0));
  }
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_FclsAbundances)->Arg(32)->Arg(64);

void BM_Vca(benchmark::State& state) {
  const Matrix& x = scene(state.range(0)).noisy_cube.data();
  for (auto _ : state) benchmark::DoNotOptimize(vca_endmembers(x, 6, 0));
}
BENCHMARK(BM_Vca)->Arg(32)->Arg(64);

void BM_RunLayer(benchmark::State& state) {
  const Matrix& x = scene(state.range(0)).noisy_cube.data();
  const InitResult init = vca_endmembers(x, 6, 0);
  LayerConfig cfg;
  cfg.t_max = 50;
  cfg.epsilon = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_layer(x, init.a0, init.s0, cfg));
}
BENCHMARK(BM_RunLayer)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RunMlnmf(benchmark::State& state) {
  const GroundTruth& gt = scene(32);
  MlnmfConfig cfg;
  cfg.layers = static_cast<int>(state.range(0));
  cfg.layer.t_max = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_mlnmf(gt.noisy_cube, cfg));
}
BENCHMARK(BM_RunMlnmf)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const GroundTruth& gt = scene(64);
  const InitResult init = vca_endmembers(gt.noisy_cube.data(), 6, 0);
  const Matrix s = fcls_abundances(gt.noisy_cube.data(), init.a0, 25.0);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(gt.a_true, gt.s_true, init.a0, s));
}
BENCHMARK(BM_Evaluate);

}  // namespace
}  // namespace mlunmix

// libbenchmark_main.a ships as LTO bytecode on some distributions, so the
// entry point is defined here.
BENCHMARK_MAIN();
