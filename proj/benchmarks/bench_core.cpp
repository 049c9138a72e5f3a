// Copyright 2026 The Crownforge Authors
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

#include <random>

#include "crownforge/geometry.hpp"
#include "crownforge/prompting.hpp"

using namespace crownforge;

namespace {

BinaryMask random_mask(std::mt19937& rng, int w, int h, int blobs) {
  BinaryMask m(w, h);
  std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1);
  std::uniform_int_distribution<int> side(4, w / 4);
  for (int b = 0; b < blobs; ++b) {
    const int x0 = px(rng), y0 = py(rng), s = side(rng);
    for (int y = y0; y < std::min(h, y0 + s); ++y) {
      for (int x = x0; x < std::min(w, x0 + s); ++x) m.set(x, y, true);
    }
  }
  return m;
}

void BM_RleRoundTrip(benchmark::State& state) {
  std::mt19937 rng(1);
  const BinaryMask m = random_mask(rng, int(state.range(0)),
                                   int(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rle_decode(rle_encode(m)));
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(m.pixels.size()));
}
BENCHMARK(BM_RleRoundTrip)->Arg(256)->Arg(1024);

void BM_MaskIou(benchmark::State& state) {
  std::mt19937 rng(2);
  const int n = int(state.range(0));
  const BinaryMask a = random_mask(rng, n, n, 6);
  const BinaryMask b = random_mask(rng, n, n, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mask_iou(a, b));
  }
}
BENCHMARK(BM_MaskIou)->Arg(256)->Arg(1024);

void BM_Nms(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<ScoredInstance> instances;
  for (int i = 0; i < state.range(0); ++i) {
    instances.push_back({random_mask(rng, 128, 128, 3), i % 3, score(rng)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nms(instances, {}));
  }
}
BENCHMARK(BM_Nms)->Arg(50)->Arg(200);

void BM_MaxFilter(benchmark::State& state) {
  RasterGrid dsm;
  dsm.width = 1024;
  dsm.height = 1024;
  dsm.bands = 1;
  dsm.dtype = Dtype::float32;
  dsm.crs = "local";
  dsm.geotransform = {0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
  dsm.f32.resize(dsm.pixel_count());
  std::mt19937 rng(4);
  std::uniform_real_distribution<float> elev(0.0f, 30.0f);
  for (auto& v : dsm.f32) v = elev(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_filter(dsm, int(state.range(0))));
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(dsm.f32.size()) * 4);
}
BENCHMARK(BM_MaxFilter)->Arg(10)->Arg(100);

void BM_RasterizePolygon(benchmark::State& state) {
  Polygon disc;
  const double r = double(state.range(0)) / 2.0 - 2.0;
  for (int k = 0; k < 64; ++k) {
    const double ang = 2.0 * M_PI * k / 64.0;
    disc.exterior.push_back({r + r * std::cos(ang), r + r * std::sin(ang)});
  }
  const int n = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize_polygon(disc, n, n));
  }
}
BENCHMARK(BM_RasterizePolygon)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
