/*
 * Copyright 2026 The tilesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "tilesim/debug/itrace.hpp"
#include "tilesim/noc/mesh.hpp"
#include "tilesim/noc/ring.hpp"
#include "tilesim/platform/system.hpp"

using namespace tilesim;

namespace {

// Uniform random single-packet MSG traffic on an n x n mesh, one tick per iteration.
void BM_MeshTick(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  noc::MeshNetwork mesh(n, n);
  std::mt19937_64 rng(1);
  const auto tiles = static_cast<std::uint32_t>(n * n);
  std::vector<std::vector<noc::Flit>> pending(tiles);
  std::vector<std::size_t> next(tiles, 0);
  std::vector<std::optional<noc::Flit>> inj(tiles);
  for (auto _ : state) {
    for (std::uint32_t t = 0; t < tiles; ++t) {
      inj[t].reset();
      if (next[t] == pending[t].size() && rng() % 8 == 0) {
        const std::vector<std::uint32_t> body(4, t);
        pending[t] = noc::packetize(noc::TrafficClass::Msg, t, static_cast<std::uint32_t>(rng() % tiles), body);
        next[t] = 0;
      }
      if (next[t] < pending[t].size() && mesh.can_inject(t, pending[t][next[t]].vc)) inj[t] = pending[t][next[t]++];
    }
    benchmark::DoNotOptimize(mesh.tick(inj));
  }
  state.SetItemsProcessed(state.iterations() * tiles);
}
BENCHMARK(BM_MeshTick)->Arg(2)->Arg(4)->Arg(8);

void BM_ItraceCompress(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<std::uint32_t> pcs(1 << 16);
  std::uint32_t pc = 0;
  for (auto& p : pcs) {
    p = pc;
    pc = rng() % 8 == 0 ? static_cast<std::uint32_t>(rng()) & ~3u : pc + 4;
  }
  for (auto _ : state) {
    debug::ItraceCompressor c;
    std::size_t records = 0;
    for (const auto p : pcs) records += c.feed(p).has_value();
    benchmark::DoNotOptimize(records);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pcs.size()));
}
BENCHMARK(BM_ItraceCompress);

void BM_RingSaturated(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  noc::RingNetwork ring(nodes, 4);
  std::vector<std::optional<noc::RingInjection>> offers(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto dest = static_cast<std::uint16_t>((i + nodes / 2) % nodes);
    offers[i] = noc::RingInjection{{static_cast<std::uint16_t>(dest << 8 | i), true}, noc::RingLane::Data};
  }
  for (auto _ : state) benchmark::DoNotOptimize(ring.tick(offers));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RingSaturated)->Arg(9)->Arg(33);

void BM_SystemWithDebug(benchmark::State& state) {
  const bool debug = state.range(0) != 0;
  auto cfg = platform::map_description(platform::PlatformDescription{.width = 4, .height = 4, .debug_enabled = debug});
  for (auto _ : state) {
    state.PauseTiming();
    auto sys = platform::map_configuration(cfg, {}, {.seed = 3, .traffic_rate = 0.05});
    state.ResumeTiming();
    for (int i = 0; i < 1000; ++i) sys.tick();
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SystemWithDebug)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
