// Copyright 2026 The mfcal Authors. All Rights Reserved.
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

#include "mfcal/cascade.hpp"
#include "mfcal/grid.hpp"
#include "mfcal/holder.hpp"
#include "mfcal/spectrum.hpp"

namespace {

mfcal::Field uniform_stack(std::size_t side, std::size_t channels) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  mfcal::Field f(side, side, channels);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

void BM_IntegralImage(benchmark::State& state) {
  const mfcal::Field f = uniform_stack(224, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mfcal::integral_image(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}
BENCHMARK(BM_IntegralImage)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HolderMap(benchmark::State& state) {
  const mfcal::Field f = uniform_stack(224, static_cast<std::size_t>(state.range(0)));
  const mfcal::ScaleSet scales = mfcal::ScaleSet::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(mfcal::holder_map(f, scales));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}
BENCHMARK(BM_HolderMap)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ProductCascade(benchmark::State& state) {
  const auto spec = mfcal::CascadeSpec::binomial(2.0 / 3.0, static_cast<int>(state.range(0)),
                                                 mfcal::CascadeDims::kTwoProduct);
  for (auto _ : state) benchmark::DoNotOptimize(mfcal::generate_product_2d(spec));
}
BENCHMARK(BM_ProductCascade)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MomentsSpectrum(benchmark::State& state) {
  const mfcal::DepthSeries series =
      mfcal::cascade_series(mfcal::CascadeSpec::binomial(2.0 / 3.0, 8), 8, 12);
  const std::vector<double> q = mfcal::q_grid(-5.0, 5.0, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(mfcal::moments_spectrum(series, q));
}
BENCHMARK(BM_MomentsSpectrum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
