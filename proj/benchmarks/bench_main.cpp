// Copyright 2026 The segkit Authors. All Rights Reserved.
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

#include <numeric>
#include <random>

#include "segkit/augmentation.hpp"
#include "segkit/evaluator.hpp"
#include "segkit/image_io.hpp"
#include "segkit/label_space.hpp"
#include "segkit/rng.hpp"
#include "segkit/tta.hpp"

namespace segkit {
namespace {

MaskImage NoiseMask(int w, int h, int classes, std::string space, unsigned seed) {
  std::mt19937 gen(seed);
  MaskImage m(w, h, std::move(space));
  for (auto& v : m.data) v = static_cast<std::uint8_t>(gen() % static_cast<unsigned>(classes));
  return m;
}

MaskImage RegionMask(int w, int h, int classes) {
  MaskImage m(w, h, "s");
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.at(x, y) = static_cast<std::uint8_t>(((x / 97) * 5 + (y / 61) * 3) % classes);
  }
  return m;
}

LabelSpace Space(const std::string& name, std::uint32_t n) {
  std::vector<ClassDef> classes;
  for (std::uint32_t i = 0; i < n; ++i) classes.push_back({i, "c" + std::to_string(i)});
  return LabelSpace(name, std::move(classes), ClassId{0});
}

ProjectionLUT Lut(const LabelSpace& source, const LabelSpace& unified) {
  std::vector<MappingEntry> entries;
  for (ClassId i = 0; i < source.size(); ++i) entries.push_back({i, i == 0 ? 0 : 1 + (i * 7) % 200});
  return build_lut(make_mapping(source, unified, std::move(entries)));
}

void BM_ProjectMask(benchmark::State& state) {
  const LabelSpace source = Space("s", 40);
  const LabelSpace unified = generic_unified_space();
  const ProjectionLUT lut = Lut(source, unified);
  const MaskImage mask = NoiseMask(2048, 1024, 40, "s", 1);
  for (auto _ : state) benchmark::DoNotOptimize(project_mask(mask, lut, unified));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProjectMask)->Unit(benchmark::kMillisecond);

void BM_RemapPng(benchmark::State& state) {
  const LabelSpace source = Space("s", 40);
  const LabelSpace unified = generic_unified_space();
  const ProjectionLUT lut = Lut(source, unified);
  const auto path = std::filesystem::temp_directory_path() / "segkit_bench_mask.png";
  write_mask_png(path, RegionMask(2048, 1024, 40));
  for (auto _ : state) {
    const MaskImage m = read_mask_png(path, "s");
    benchmark::DoNotOptimize(encode_mask_png(project_mask(m, lut, unified)));
  }
  std::filesystem::remove(path);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RemapPng)->Unit(benchmark::kMillisecond);

void BM_Accumulate(benchmark::State& state) {
  const MaskImage pred = NoiseMask(2048, 1024, 19, "", 2);
  const MaskImage gt = NoiseMask(2048, 1024, 20, "", 3);
  ConfusionMatrix cm(19);
  for (auto _ : state) accumulate(cm, pred, gt, ClassId{19});
  benchmark::DoNotOptimize(cm.total());
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(gt.data.size()));
}
BENCHMARK(BM_Accumulate)->Unit(benchmark::kMillisecond);

void BM_Argmax(benchmark::State& state) {
  const int classes = static_cast<int>(state.range(0));
  std::mt19937 gen(4);
  std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
  LogitMap l(512, 256, classes);
  for (auto& v : l.data) v = dist(gen);
  for (auto _ : state) benchmark::DoNotOptimize(argmax_mask(l));
}
BENCHMARK(BM_Argmax)->Arg(19)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TrainPipeline(benchmark::State& state) {
  std::mt19937 gen(5);
  ImageBuffer image(2048, 1024);
  for (auto& v : image.data) v = static_cast<std::uint8_t>(gen());
  const MaskImage mask = RegionMask(2048, 1024, 30);
  const AugConfig cfg;
  std::uint64_t k = 0;
  for (auto _ : state) {
    RngStream rng(1, k++);
    benchmark::DoNotOptimize(train_pipeline(image, mask, cfg, rng));
  }
}
BENCHMARK(BM_TrainPipeline)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace segkit

BENCHMARK_MAIN();
