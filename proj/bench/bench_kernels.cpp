/* Copyright 2026 The gigadetect Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "gigadetect/ensemble.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/imaging.hpp"
#include "gigadetect/kernels.hpp"

namespace {

using namespace gigadetect;

Tensor RandomTensor(int h, int w, int c, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(size_t(h) * w * c);
  for (float& x : v) x = u(rng);
  return Tensor(Shape3{h, w, c}, std::move(v));
}

kernels::ConvParams RandomConv(int filters, int size, int in_c) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(-0.1f, 0.1f);
  kernels::ConvParams p;
  p.filters = filters;
  p.size = size;
  p.in_channels = in_c;
  p.weights.resize(size_t(filters) * in_c * size * size);
  for (float& w : p.weights) w = u(rng);
  p.bias.assign(size_t(filters), 0.0f);
  return p;
}

// Args: spatial size, input channels, filters.
void ConvShapes(benchmark::internal::Benchmark* b) {
  b->Args({104, 64, 128})->Args({52, 128, 256})->Args({26, 512, 1024});
}

void BM_ConvDirect(benchmark::State& state) {
  const int s = int(state.range(0)), c = int(state.range(1));
  const Tensor x = RandomTensor(s, s, c, 1);
  const auto p = RandomConv(int(state.range(2)), 3, c);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::Conv2dDirect(x, p));
}
BENCHMARK(BM_ConvDirect)->Apply(ConvShapes)->Unit(benchmark::kMillisecond);

void BM_ConvGemm(benchmark::State& state, kernels::Exec exec) {
  const int s = int(state.range(0)), c = int(state.range(1));
  const Tensor x = RandomTensor(s, s, c, 1);
  const auto packed = kernels::Pack(RandomConv(int(state.range(2)), 3, c));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::Conv2d(x, packed, exec));
  }
}
BENCHMARK_CAPTURE(BM_ConvGemm, serial, kernels::Exec::kSerial)
    ->Apply(ConvShapes)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ConvGemm, parallel, kernels::Exec::kParallel)
    ->Apply(ConvShapes)
    ->Unit(benchmark::kMillisecond);

void BM_Maxpool(benchmark::State& state, kernels::Exec exec) {
  const Tensor x = RandomTensor(208, 208, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::Maxpool2x2(x, exec));
}
BENCHMARK_CAPTURE(BM_Maxpool, serial, kernels::Exec::kSerial);
BENCHMARK_CAPTURE(BM_Maxpool, parallel, kernels::Exec::kParallel);

void BM_Degrade(benchmark::State& state, kernels::Exec exec) {
  Raster img(2000, 2000);
  std::mt19937_64 rng(3);
  for (auto& v : img.mutable_data()) v = uint8_t(rng());
  const double dst = double(state.range(0)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Degrade(img.View(), 0.15, dst, exec));
  }
}
BENCHMARK_CAPTURE(BM_Degrade, serial, kernels::Exec::kSerial)
    ->Arg(30)->Arg(90)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Degrade, parallel, kernels::Exec::kParallel)
    ->Arg(30)->Arg(90)->Arg(300)->Unit(benchmark::kMillisecond);

// Tile + mock detect + stitch; the argument is the worker count (1 serial).
void BM_TileLoop(benchmark::State& state) {
  SynthOptions so;
  so.width = so.height = 4000;
  so.n_objects = 300;
  so.seed = 4;
  const SynthScene scene = MakeSynthScene(so);
  MockOracleConfig cfg;
  cfg.planted_truth = scene.truth;
  cfg.false_positives_per_tile = 0.5;
  const MockOracle mock(cfg);
  const DetectorBackend* backend = &mock;
  ScaleProfile profile;
  profile.scale_id = "bench";
  profile.window_px = 416;
  profile.class_ids = {so.class_id};
  RunOptions options;
  options.workers = int(state.range(0));
  const ImageMeta meta{"bench", {0.0, 0.0, 0.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunEnsemble(scene.image, meta, {&profile, 1},
                                         {&backend, 1}, options));
  }
}
BENCHMARK(BM_TileLoop)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
