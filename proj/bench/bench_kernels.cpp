// Copyright 2026 The InterTrack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference against OpenMP variants of the hot kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "intertrack/geometry.hpp"
#include "intertrack/kernels.hpp"

namespace {

using namespace intertrack;

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), 2.0 + u(rng));
  return pts;
}

std::vector<Splat> splats(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(16.0, 112.0);
  std::vector<Splat> s(n);
  for (auto& p : s) p = Splat{u(rng), u(rng), 1.0};
  return s;
}

void BM_NearestSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const NeighborIndex index(cloud(n, 1));
  const auto queries = cloud(n, 2);
  std::vector<Neighbor> out(n);
  for (auto _ : state) {
    nearest_neighbors_serial(index, queries, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_NearestParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const NeighborIndex index(cloud(n, 1));
  const auto queries = cloud(n, 2);
  std::vector<Neighbor> out(n);
  for (auto _ : state) {
    nearest_neighbors_parallel(index, queries, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_SplatSerial(benchmark::State& state) {
  const auto s = splats(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    Transmittance t(128, 128);
    splat_transmittance_serial(s, kDefaultSplatRadius, t);
    benchmark::DoNotOptimize(t.partial_product.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}

void BM_SplatParallel(benchmark::State& state) {
  const auto s = splats(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    Transmittance t(128, 128);
    splat_transmittance_parallel(s, kDefaultSplatRadius, t);
    benchmark::DoNotOptimize(t.partial_product.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = cloud(n, 4);
  const NeighborIndex b(cloud(n, 5));
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_distance(a, b, true).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_NearestSerial)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(BM_NearestParallel)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(BM_SplatSerial)->Arg(512)->Arg(4096);
BENCHMARK(BM_SplatParallel)->Arg(512)->Arg(4096);
BENCHMARK(BM_Chamfer)->Arg(512)->Arg(4096);

BENCHMARK_MAIN();
