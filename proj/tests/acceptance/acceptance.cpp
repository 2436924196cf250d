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

// One line per acceptance criterion: PASS or FAIL, a name and the measured
// numbers. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tilesim/debug/itrace.hpp"
#include "tilesim/debug/registers.hpp"
#include "tilesim/host/decode.hpp"
#include "tilesim/host/merge.hpp"
#include "tilesim/na/lsu.hpp"
#include "tilesim/platform/config.hpp"
#include "tilesim/platform/system.hpp"

using namespace tilesim;
using debug::TraceEvent;
using nlohmann::json;
using tilesim::testing::mesh_config;

namespace {

// Pinned tolerances.
constexpr double kMeshSecondsLimit = 60.0;
constexpr std::size_t kPacketsPerRun = 10000;
constexpr int kSeeds = 5;
constexpr int kDmaTransfers = 200;
constexpr std::uint32_t kDmaMaxWords = 1024;
constexpr int kCompressionSequences = 1000;
constexpr std::size_t kCompressionMaxLength = 10000;
constexpr int kCrossTriggerScenarios = 20;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int index, const char* name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s [%2d] %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
  std::fflush(stdout);
}

std::string pgas_description_path(const std::string& name) {
  return tilesim::testing::data_path("descriptions/" + name + ".json");
}

std::vector<std::uint32_t> itrace_pcs(const std::vector<TraceEvent>& events, debug::ModuleId module) {
  std::vector<host::ItraceRun> runs;
  for (const auto& e : events) {
    if (e.module != module || e.kind != debug::PacketType::Itrace) continue;
    runs.push_back(std::get<host::ItraceRun>(host::decode_event(e).detail));
  }
  return host::decompress_itrace(runs);
}

std::string jsonl(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& e : events) out += host::jsonl_line(host::decode_event(e));
  return out;
}

// Ping-pong on tiles 0 and 1, a counting loop everywhere else.
platform::SystemInstance busy_system(int w, int h, bool debug, std::uint64_t seed, double rate) {
  auto programs = tilesim::testing::ping_pong();
  const auto count = pe::assemble(tilesim::testing::read_text(tilesim::testing::data_path("programs/count.s")));
  for (std::uint32_t t = 2; t < static_cast<std::uint32_t>(w * h); ++t) programs[t] = count;
  return platform::map_configuration(mesh_config(w, h, debug, 64), programs, {.seed = seed, .traffic_rate = rate});
}

Verdict mesh_delivery() {
  std::ostringstream d;
  bool ok = true;
  for (const int n : {2, 3, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t packets = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      const auto r = tilesim::testing::run_mesh_traffic(n, n, static_cast<std::uint64_t>(seed), kPacketsPerRun, false);
      packets += r.packets_delivered;
      if (!r.ok() || r.packets_injected < kPacketsPerRun) {
        ok = false;
        d << n << "x" << n << " seed " << seed << " failed (" << r.failure << ") ";
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= kMeshSecondsLimit) ok = false;
    d << n << "x" << n << ": " << packets << " packets in " << secs << " s; ";
  }
  d << "limit " << kMeshSecondsLimit << " s per mesh";
  return {ok, d.str()};
}

Verdict conservation() {
  std::uint64_t cycles = 0;
  for (const int n : {2, 3, 4}) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      const auto r = tilesim::testing::run_mesh_traffic(n, n, static_cast<std::uint64_t>(seed), kPacketsPerRun, true);
      if (!r.ok()) {
        return {false, std::to_string(n) + "x" + std::to_string(n) + " seed " + std::to_string(seed) + ": " +
                           r.failure};
      }
      cycles += r.cycles;
    }
  }
  return {true, "invariants held on " + std::to_string(cycles) + " checked cycles"};
}

Verdict determinism() {
  auto once = [] {
    const auto run = tilesim::testing::run_with_session(busy_system(3, 3, true, 42, 0.05), 4000,
                                               [](host::Session& s) { s.start_collection_all(); });
    return std::pair{platform::canonical_dump(run.stats), jsonl(run.merged)};
  };
  const auto a = once();
  const auto b = once();
  const bool ok = a == b && !a.second.empty();
  return {ok, "stats " + std::to_string(a.first.size()) + " bytes, trace " + std::to_string(a.second.size()) +
                  " bytes, identical: " + (ok ? "yes" : "no")};
}

Verdict dma_oracle() {
  std::mt19937_64 rng(2024);
  auto sys = platform::map_configuration(mesh_config(3, 3, false), {});
  const std::uint32_t words = static_cast<std::uint32_t>(sys.memory(0).size());
  for (std::size_t t = 0; t < sys.num_tiles(); ++t) {
    for (auto& w : sys.memory(t)) w = static_cast<std::uint32_t>(rng());
  }
  std::vector<std::vector<std::uint32_t>> oracle;
  for (std::size_t t = 0; t < sys.num_tiles(); ++t) {
    oracle.emplace_back(sys.memory(t).begin(), sys.memory(t).end());
  }
  std::uint64_t moved = 0;
  int reads = 0;
  for (int i = 0; i < kDmaTransfers; ++i) {
    const auto local = static_cast<std::uint32_t>(rng() % sys.num_tiles());
    auto remote = static_cast<std::uint32_t>(rng() % (sys.num_tiles() - 1));
    if (remote >= local) ++remote;
    std::uint32_t len = static_cast<std::uint32_t>(rng() % (kDmaMaxWords + 1));
    if (i == 0) len = 0;
    if (i == 1) len = kDmaMaxWords;
    const auto la = static_cast<std::uint32_t>(rng() % (words - len + 1));
    const auto ra = static_cast<std::uint32_t>(rng() % (words - len + 1));
    const bool read = rng() & 1u;
    reads += read;
    const auto txn = sys.adapter(local).dma_start(read ? na::DmaDir::ReadRemote : na::DmaDir::WriteRemote, la * 4,
                                                  remote, ra * 4, len, sys.memory(local));
    for (int c = 0; c < 200000 && !sys.adapter(local).dma_done(txn); ++c) sys.tick();
    if (!sys.adapter(local).dma_done(txn)) return {false, "transfer " + std::to_string(i) + " never completed"};
    if (sys.adapter(local).dma_error(txn)) return {false, "transfer " + std::to_string(i) + " reported an error"};
    auto& src = read ? oracle[remote] : oracle[local];
    auto& dst = read ? oracle[local] : oracle[remote];
    const auto s0 = read ? ra : la;
    const auto d0 = read ? la : ra;
    std::copy_n(src.begin() + s0, len, dst.begin() + d0);
    moved += len;
    for (std::size_t t = 0; t < sys.num_tiles(); ++t) {
      if (!std::equal(oracle[t].begin(), oracle[t].end(), sys.memory(t).begin())) {
        return {false, "memory of tile " + std::to_string(t) + " differs after transfer " + std::to_string(i)};
      }
    }
  }
  return {true, std::to_string(kDmaTransfers) + " transfers (" + std::to_string(reads) + " reads), " +
                    std::to_string(moved) + " words, memories equal the copy oracle"};
}

Verdict pgas_totality() {
  constexpr std::uint32_t kTiles = 4;
  constexpr std::uint32_t kPart = 64 * 1024;
  const auto cfg = platform::map_description(
      platform::parse_description(json::parse(tilesim::testing::read_text(pgas_description_path("mesh_4x4_pgas")))));
  std::uint64_t checked = 0;
  for (std::uint32_t own = 0; own < kTiles; ++own) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::uint64_t addr = 0; addr < 2ull * kTiles * kPart; addr += 4) {
      const auto t = na::lsu_translate(static_cast<std::uint32_t>(addr), own, kPart, kTiles);
      ++checked;
      if (addr >= kTiles * kPart) {
        if (t.kind != na::Translation::Kind::Fault) return {false, "address beyond the space did not fault"};
        continue;
      }
      const auto want_tile = static_cast<std::uint32_t>(addr / kPart);
      const auto want_kind = want_tile == own ? na::Translation::Kind::Local : na::Translation::Kind::Remote;
      if (t.kind != want_kind || t.tile != want_tile || t.offset != addr % kPart) {
        return {false, "bad translation of " + std::to_string(addr)};
      }
      if (!seen.emplace(t.tile, t.offset).second) return {false, "two addresses share a location"};
    }
    if (seen.size() != kTiles * kPart / 4) return {false, "translation is not onto"};
  }
  for (const auto top : {0xFFFFFFFCu, 0x80000000u}) {
    if (na::lsu_translate(top, 0, kPart, kTiles).kind != na::Translation::Kind::Fault) {
      return {false, "high address did not fault"};
    }
  }
  // The generated 4x4 map agrees with the translation it is built on.
  for (const auto& r : cfg.memory_map) {
    if (r.kind == "global" && na::lsu_translate(r.base, r.tile, r.size, 16).kind != na::Translation::Kind::Local) {
      return {false, "generated partition of tile " + std::to_string(r.tile) + " is not local"};
    }
  }
  return {true, std::to_string(checked) + " addresses over 4 tiles x 64 KiB, each valid one maps to one location"};
}

Verdict compression_round_trip() {
  std::mt19937_64 rng(77);
  std::uint64_t total = 0;
  for (int i = 0; i < kCompressionSequences; ++i) {
    const auto len = rng() % (kCompressionMaxLength + 1);
    std::vector<std::uint32_t> pcs;
    std::uint32_t pc = static_cast<std::uint32_t>(rng() % 0x10000) * 4;
    for (std::size_t k = 0; k < len; ++k) {
      pcs.push_back(pc);
      pc = (rng() % 6 == 0) ? static_cast<std::uint32_t>(rng()) & ~3u : pc + 4;
    }
    // Through the compressor, the wire format and the host decoder.
    debug::ItraceCompressor c;
    std::vector<host::ItraceRun> runs;
    auto take = [&](const std::optional<debug::ItraceRecord>& r) {
      if (!r) return;
      const TraceEvent e{1, 0, debug::PacketType::Itrace,
                         {static_cast<std::uint16_t>(r->start_pc >> 16), static_cast<std::uint16_t>(r->start_pc),
                          static_cast<std::uint16_t>(r->run_length)}};
      runs.push_back(std::get<host::ItraceRun>(host::decode_event(e).detail));
    };
    for (const auto p : pcs) take(c.feed(p));
    take(c.flush());
    if (host::decompress_itrace(runs) != pcs) return {false, "sequence " + std::to_string(i) + " did not round-trip"};
    total += len;
  }
  return {true, std::to_string(kCompressionSequences) + " sequences, " + std::to_string(total) + " pcs, identity"};
}

Verdict end_to_end() {
  const auto run = tilesim::testing::run_with_session(busy_system(2, 2, true, 3, 0.05), 3000,
                                             [](host::Session& s) { s.start_collection_all(); });
  auto a = run.arrival;
  auto e = run.emitted;
  std::sort(a.begin(), a.end());
  std::sort(e.begin(), e.end());
  std::map<debug::ModuleId, std::vector<TraceEvent>> by;
  for (const auto& ev : run.arrival) by[ev.module].push_back(ev);
  std::vector<std::vector<TraceEvent>> streams;
  for (auto& [id, v] : by) streams.push_back(v);
  const bool multiset = a == e && !e.empty();
  const bool ordered = std::is_sorted(run.merged.begin(), run.merged.end(), host::merge_before) &&
                       run.merged == host::merge_streams(streams);
  const bool nine = run.modules.size() == 9;
  return {multiset && ordered && nine, std::to_string(run.emitted.size()) + " events; multiset equal: " +
                                           (multiset ? "yes" : "no") + ", ordered: " + (ordered ? "yes" : "no") +
                                           ", descriptors: " + std::to_string(run.modules.size())};
}

Verdict cross_trigger() {
  std::mt19937_64 rng(5);
  std::uint64_t worst = 0;
  std::size_t worst_bound = 0;
  for (int s = 0; s < kCrossTriggerScenarios; ++s) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const auto tiles = static_cast<std::size_t>(n * n);
    const auto module_count = 1 + 2 * tiles;
    const auto origin = static_cast<debug::ModuleId>(1 + rng() % (2 * tiles));
    std::uint32_t count = 1;
    if (origin <= 2) count = 1 + static_cast<std::uint32_t>(rng() % 50);  // ping and pong cores
    if (origin > tiles) count = 1 + static_cast<std::uint32_t>(rng() % 100);  // flits through a router
    const auto run = tilesim::testing::run_with_session(busy_system(n, n, true, static_cast<std::uint64_t>(s), 0.1), 2000,
                                               [&](host::Session& ses) {
                                                 ses.start_collection_all();
                                                 ses.set_trigger({origin, debug::TriggerCondition::EventCount, count,
                                                                  256, debug::TriggerAction::StopCollection,
                                                                  debug::TriggerScope::Global});
                                               });
    std::ostringstream where;
    where << "scenario " << s << " (" << n << "x" << n << ", origin " << int(origin) << ", count " << count << ")";
    if (run.broadcast_log.size() != 1 || !run.broadcast_log[0].tail_injected) {
      return {false, where.str() + ": trigger did not fire"};
    }
    const auto& b = run.broadcast_log[0];
    for (std::size_t id = 1; id < module_count; ++id) {
      bool stopped = false;
      for (const auto& c : run.collection_log) {
        if (c.module != id || c.enabled || c.cycle < b.fired) continue;
        stopped = true;
        if (id == origin) break;
        const auto latency = c.cycle - *b.tail_injected;
        if (latency > worst) {
          worst = latency;
          worst_bound = module_count;
        }
        if (latency > module_count) {
          return {false, where.str() + ": module " + std::to_string(id) + " stopped after " + std::to_string(latency)};
        }
        break;
      }
      if (!stopped) return {false, where.str() + ": module " + std::to_string(id) + " never stopped"};
    }
  }
  return {true, std::to_string(kCrossTriggerScenarios) + " scenarios; worst latency " + std::to_string(worst) +
                    " cycles against a ring of " + std::to_string(worst_bound)};
}

Verdict trigger_gating() {
  const auto programs = tilesim::testing::ping_pong();
  auto system = [&] { return platform::map_configuration(mesh_config(2, 2), programs); };
  const std::vector<debug::ModuleId> core0{1};
  const auto full_run = tilesim::testing::run_with_session(system(), 5000, [&](host::Session& s) { s.start_collection(core0); });
  const auto full = itrace_pcs(full_run.merged, 1);
  if (full.empty()) return {false, "no reference trace"};
  std::vector<std::uint32_t> addrs(full.begin(), full.end());
  std::sort(addrs.begin(), addrs.end());
  addrs.erase(std::unique(addrs.begin(), addrs.end()), addrs.end());
  for (const auto addr : addrs) {
    const auto run = tilesim::testing::run_with_session(system(), 5000, [&](host::Session& s) {
      s.set_trigger({1, debug::TriggerCondition::PcEquals, addr, 256, debug::TriggerAction::StartCollection,
                     debug::TriggerScope::Local});
    });
    const auto gated = itrace_pcs(run.merged, 1);
    const auto first = std::find(full.begin(), full.end(), addr);
    if (!std::equal(gated.begin(), gated.end(), first, full.end()) ||
        gated.size() != static_cast<std::size_t>(full.end() - first)) {
      return {false, "trace gated at " + std::to_string(addr) + " is not the suffix from its first retirement"};
    }
  }
  return {true, std::to_string(addrs.size()) + " trigger addresses; each trace starts at the first retirement"};
}

Verdict golden_files() {
  for (const std::string name : {"mesh_1x1", "mesh_2x2", "mesh_4x4_pgas"}) {
    const auto d = platform::parse_description(json::parse(tilesim::testing::read_text(pgas_description_path(name))));
    const auto text = platform::canonical_dump(platform::to_json(platform::map_description(d)));
    if (text != tilesim::testing::read_text(tilesim::testing::data_path("golden/" + name + ".config.json"))) {
      return {false, name + " differs from its golden file"};
    }
  }
  const auto cfg = platform::parse_configuration(
      json::parse(tilesim::testing::read_text(tilesim::testing::data_path("configs/hand_2x1.config.json"))));
  const auto run = tilesim::testing::run_with_session(platform::map_configuration(cfg, {}), 10, {});
  if (run.modules != cfg.debug_modules) return {false, "hand-written configuration: discovery differs"};
  return {true, "3 golden configurations byte-identical; hand-written configuration discovers " +
                    std::to_string(run.modules.size()) + " modules as listed"};
}

Verdict non_interference() {
  std::uint64_t cycles = 0;
  for (const std::uint64_t seed : {0u, 1u, 2u}) {
    auto plain = busy_system(3, 3, false, seed, 0.1);
    auto traced = busy_system(3, 3, true, seed, 0.1);
    auto* f = traced.fabric();
    for (std::size_t id = 1; id < f->module_count(); ++id) {
      f->write_register(static_cast<debug::ModuleId>(id), debug::reg::kEnable, 1, 0);
    }
    for (int c = 0; c < 3000; ++c) {
      plain.tick();
      traced.tick();
      ++cycles;
      if (!plain.functional_equal(traced)) {
        return {false, "seed " + std::to_string(seed) + " diverged at cycle " + std::to_string(c)};
      }
    }
    if (plain.stats() != traced.stats()) return {false, "seed " + std::to_string(seed) + ": stats differ"};
    if (f->emission_log().empty()) return {false, "the traced run collected nothing"};
  }
  return {true, "memories, registers and stats equal on " + std::to_string(cycles) + " cycles, 3 seeds"};
}

}  // namespace

int main() {
  report(1, "delivery", mesh_delivery);
  report(2, "conservation", conservation);
  report(3, "determinism", determinism);
  report(4, "dma-oracle", dma_oracle);
  report(5, "pgas-totality", pgas_totality);
  report(6, "compression-round-trip", compression_round_trip);
  report(7, "end-to-end-debug", end_to_end);
  report(8, "cross-trigger-latency", cross_trigger);
  report(9, "trigger-gating", trigger_gating);
  report(10, "generator-golden", golden_files);
  report(11, "non-interference", non_interference);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
