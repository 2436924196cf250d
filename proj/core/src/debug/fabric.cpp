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

#include "tilesim/debug/fabric.hpp"

#include <algorithm>
#include <stdexcept>

#include "tilesim/debug/registers.hpp"

namespace tilesim::debug {

namespace {

constexpr std::size_t lane_index(noc::RingLane l) { return static_cast<std::size_t>(l); }

std::uint16_t fault_code(pe::FaultKind k) {
  return static_cast<std::uint16_t>(k == pe::FaultKind::MemoryFault ? FaultCode::MemoryFault
                                                                    : FaultCode::IllegalInstruction);
}

}  // namespace

std::vector<ModuleDescriptor> module_layout(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("mesh dimensions must be positive");
  const auto tiles = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const auto count = 1 + 2 * tiles;
  if (count > 255) throw std::invalid_argument("debug ring addresses at most 255 modules");

  std::vector<ModuleDescriptor> out;
  out.reserve(count);
  out.push_back({kExtIfModule, ModuleType::ExtIf, kModuleVersion, static_cast<std::uint16_t>(count)});
  for (std::size_t t = 0; t < tiles; ++t) {
    out.push_back({static_cast<ModuleId>(1 + t), ModuleType::CoreTrace, kModuleVersion,
                   static_cast<std::uint16_t>(t)});
  }
  for (std::size_t r = 0; r < tiles; ++r) {
    const auto x = r % static_cast<std::size_t>(width);
    const auto y = r / static_cast<std::size_t>(width);
    out.push_back({static_cast<ModuleId>(1 + tiles + r), ModuleType::NocStat, kModuleVersion,
                   static_cast<std::uint16_t>((x << 8) | y)});
  }
  return out;
}

DebugFabric::DebugFabric(FabricParams params)
    : params_(params), ring_(module_layout(params.width, params.height).size(), params.ring_depth) {
  if (params.nocstat_window == 0) throw std::invalid_argument("NOCSTAT window must be positive");
  const auto layout = module_layout(params.width, params.height);
  num_tiles_ = (layout.size() - 1) / 2;
  modules_.resize(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    modules_[i].desc = layout[i];
    modules_[i].window = params.nocstat_window;
  }
}

void DebugFabric::send(Module& m, noc::RingLane lane, const DebugPacket& p, std::optional<std::size_t> bc) {
  m.out[lane_index(lane)].packets.push_back({debug_packetize(p), bc});
}

void DebugFabric::emit(Module& m, std::uint64_t cycle, PacketType kind, std::vector<std::uint16_t> payload) {
  TraceEvent ev{m.desc.id, static_cast<std::uint32_t>(cycle), kind, std::move(payload)};
  send(m, noc::RingLane::Data, to_packet(ev));
  m.undelivered.push_back(ev.timestamp);
  emission_log_.push_back(std::move(ev));
}

bool DebugFabric::set_enabled(Module& m, bool on, std::uint64_t cycle, CollectionChange::Cause cause) {
  if (m.enabled == on) return false;
  if (!on && m.desc.type == ModuleType::CoreTrace) {
    if (const auto rec = m.compressor.flush()) {
      emit(m, cycle, PacketType::Itrace,
           {hi16(rec->start_pc), lo16(rec->start_pc), static_cast<std::uint16_t>(rec->run_length)});
    }
  }
  m.enabled = on;
  collection_log_.push_back({cause, cycle, m.desc.id, on});
  return true;
}

void DebugFabric::fire(Module& m, std::uint64_t cycle) {
  m.armed = false;
  const bool on = m.action == TriggerAction::StartCollection;
  const bool changed = set_enabled(m, on, cycle, CollectionChange::Cause::Trigger);
  const std::vector<std::uint16_t> body{m.desc.id, static_cast<std::uint16_t>(m.action),
                                        static_cast<std::uint16_t>(m.scope)};
  if (m.scope == TriggerScope::Global) {
    // A fired global trigger always goes out; receivers apply it idempotently.
    broadcast_log_.push_back({m.desc.id, m.action, cycle, std::nullopt});
    send(m, noc::RingLane::Trigger,
         DebugPacket{kBroadcast, m.desc.id, PacketType::Trigger, static_cast<std::uint32_t>(cycle), body},
         broadcast_log_.size() - 1);
  } else if (!changed) {
    return;
  }
  auto payload = body;
  payload.push_back(0);
  emit(m, cycle, PacketType::Trigger, std::move(payload));
}

void DebugFabric::observe_core(Module& m, std::uint64_t cycle, const TileObservation& t) {
  if (t.retire) {
    ++m.observed;
    const auto pc = t.retire->pc;
    if (m.armed && ((m.cond == TriggerCondition::PcEquals && pc == m.arg) ||
                    (m.cond == TriggerCondition::EventCount && m.observed == m.arg))) {
      fire(m, cycle);
    }
    if (m.enabled) {
      if (const auto rec = m.compressor.feed(pc)) {
        emit(m, cycle, PacketType::Itrace,
             {hi16(rec->start_pc), lo16(rec->start_pc), static_cast<std::uint16_t>(rec->run_length)});
      }
    }
  }
  if (t.fault) {
    emit(m, cycle, PacketType::Fault,
         {fault_code(t.fault->kind), hi16(t.fault->pc), lo16(t.fault->pc), hi16(t.fault->addr),
          lo16(t.fault->addr)});
  }
  for (const auto& e : t.na_events) {
    if (e.kind == na::NaEvent::Kind::UnknownPort) {
      emit(m, cycle, PacketType::Fault,
           {static_cast<std::uint16_t>(FaultCode::UnknownPort), hi16(e.a), lo16(e.a), hi16(e.b), lo16(e.b)});
    } else if (m.enabled) {
      emit(m, cycle, PacketType::DmaDone,
           {static_cast<std::uint16_t>(e.a), static_cast<std::uint16_t>(e.b), static_cast<std::uint16_t>(e.c)});
    }
  }
}

void DebugFabric::observe_router(Module& m, std::uint64_t cycle,
                                 const std::array<std::uint8_t, noc::kNumPorts>& dep) {
  std::uint32_t sum = 0;
  for (std::size_t p = 0; p < noc::kNumPorts; ++p) {
    m.stat_counts[p] += dep[p];
    m.trig_counts[p] += dep[p];
    sum += dep[p];
  }
  const auto before = m.observed;
  m.observed += sum;
  if (m.armed && m.cond == TriggerCondition::EventCount && before < m.arg && m.observed >= m.arg) {
    fire(m, cycle);
  }

  if (cycle + 1 - m.trig_start >= m.trig_window) {
    if (m.armed && m.cond == TriggerCondition::LinkLoad) {
      for (const auto c : m.trig_counts) {
        if (link_load_above(c, m.trig_window, m.arg)) {
          fire(m, cycle);
          break;
        }
      }
    }
    m.trig_counts = {};
    m.trig_start = cycle + 1;
  }

  if (cycle + 1 - m.stat_start >= m.window) {
    if (m.enabled) {
      std::vector<std::uint16_t> payload{hi16(m.stat_index), lo16(m.stat_index)};
      for (const auto c : m.stat_counts) payload.push_back(static_cast<std::uint16_t>(c));
      emit(m, cycle, PacketType::NocStat, std::move(payload));
    }
    ++m.stat_index;
    m.stat_counts = {};
    m.stat_start = cycle + 1;
  }
}

void DebugFabric::observe(std::uint64_t cycle, std::span<const TileObservation> tiles,
                          std::span<const std::array<std::uint8_t, noc::kNumPorts>> departures) {
  if (tiles.size() != num_tiles_ || departures.size() != num_tiles_) {
    throw std::invalid_argument("one observation per tile and router");
  }
  for (std::size_t t = 0; t < num_tiles_; ++t) observe_core(modules_[1 + t], cycle, tiles[t]);
  for (std::size_t r = 0; r < num_tiles_; ++r) observe_router(modules_[1 + num_tiles_ + r], cycle, departures[r]);
}

void DebugFabric::flush(std::uint64_t now) {
  if (now == 0) return;
  const auto ts = now - 1;
  for (auto& m : modules_) {
    if (!m.enabled) continue;
    if (m.desc.type == ModuleType::CoreTrace) {
      if (const auto rec = m.compressor.flush()) {
        emit(m, ts, PacketType::Itrace,
             {hi16(rec->start_pc), lo16(rec->start_pc), static_cast<std::uint16_t>(rec->run_length)});
      }
    } else if (m.desc.type == ModuleType::NocStat && now > m.stat_start) {
      std::vector<std::uint16_t> payload{hi16(m.stat_index), lo16(m.stat_index)};
      for (const auto c : m.stat_counts) payload.push_back(static_cast<std::uint16_t>(c));
      emit(m, ts, PacketType::NocStat, std::move(payload));
      ++m.stat_index;
      m.stat_counts = {};
      m.stat_start = now;
    }
  }
}

DebugPacket DebugFabric::descriptor_reply(const Module& m, std::uint64_t cycle) const {
  return {kExtIfModule, m.desc.id, PacketType::Discover, static_cast<std::uint32_t>(cycle),
          {static_cast<std::uint16_t>(m.desc.type), m.desc.version, m.desc.attach}};
}

std::optional<std::uint16_t> DebugFabric::read_register(ModuleId id, std::uint16_t r) const {
  const auto& m = modules_.at(id);
  switch (r) {
    case reg::kType: return static_cast<std::uint16_t>(m.desc.type);
    case reg::kVersion: return m.desc.version;
    case reg::kAttach: return m.desc.attach;
    default: break;
  }
  if (m.desc.type == ModuleType::ExtIf) {
    if (r == reg::kRun) return static_cast<std::uint16_t>(run_requested_ ? 1 : 0);
    return std::nullopt;
  }
  switch (r) {
    case reg::kEnable: return static_cast<std::uint16_t>(m.enabled);
    case reg::kTriggerInput: return static_cast<std::uint16_t>(m.trigger_input);
    case reg::kWindow:
      if (m.desc.type != ModuleType::NocStat) return std::nullopt;
      return m.window;
    case reg::kTrigCond: return static_cast<std::uint16_t>(m.cond);
    case reg::kTrigArgHi: return hi16(m.arg);
    case reg::kTrigArgLo: return lo16(m.arg);
    case reg::kTrigWindow: return m.trig_window;
    case reg::kTrigAction: return static_cast<std::uint16_t>(m.action);
    case reg::kTrigScope: return static_cast<std::uint16_t>(m.scope);
    case reg::kTrigArm: return static_cast<std::uint16_t>(m.armed);
    case reg::kTrigError: return m.trig_error;
    default: return std::nullopt;
  }
}

void DebugFabric::write_register(ModuleId id, std::uint16_t r, std::uint16_t v, std::uint64_t cycle) {
  auto& m = modules_.at(id);
  if (m.desc.type == ModuleType::ExtIf) {
    if (r == reg::kRun && v != 0) run_requested_ = true;
    return;
  }
  switch (r) {
    case reg::kEnable:
      if (v <= 1) set_enabled(m, v != 0, cycle, CollectionChange::Cause::Register);
      break;
    case reg::kTriggerInput:
      if (v <= 1) m.trigger_input = v != 0;
      break;
    case reg::kWindow:
      if (m.desc.type == ModuleType::NocStat && v != 0) m.window = v;
      break;
    case reg::kTrigCond:
      if (v <= 3) m.cond = static_cast<TriggerCondition>(v);
      break;
    case reg::kTrigArgHi: m.arg = join16(v, lo16(m.arg)); break;
    case reg::kTrigArgLo: m.arg = join16(hi16(m.arg), v); break;
    case reg::kTrigWindow:
      if (v != 0) m.trig_window = v;
      break;
    case reg::kTrigAction:
      if (v <= 1) m.action = static_cast<TriggerAction>(v);
      break;
    case reg::kTrigScope:
      if (v <= 1) m.scope = static_cast<TriggerScope>(v);
      break;
    case reg::kTrigArm: {
      if (v == 0) {
        m.armed = false;
        break;
      }
      m.trig_error = 0;
      try {
        validate(TriggerSpec{id, m.cond, m.arg, m.trig_window, m.action, m.scope}, m.desc.type);
        m.armed = m.cond != TriggerCondition::None;
        m.trig_counts = {};
        m.trig_start = cycle;
      } catch (const TypeMismatch&) {
        m.trig_error = reg::kTrigErrTypeMismatch;
        m.armed = false;
      } catch (const std::invalid_argument&) {
        m.trig_error = reg::kTrigErrBadArgument;
        m.armed = false;
      }
      break;
    }
    default:
      break;
  }
}

void DebugFabric::host_send(const DebugPacket& p, std::uint64_t cycle) {
  auto& ext = modules_[kExtIfModule];
  const auto ts = static_cast<std::uint32_t>(cycle);
  if (p.dest == kExtIfModule) {
    switch (p.type) {
      case PacketType::Discover:
        host_out_.push_back(descriptor_reply(ext, cycle));
        send(ext, noc::RingLane::Data, DebugPacket{kBroadcast, kExtIfModule, PacketType::Discover, ts, {}});
        break;
      case PacketType::RegRead: {
        if (p.body.size() != 1) break;
        const auto v = read_register(kExtIfModule, p.body[0]);
        host_out_.push_back({kExtIfModule, kExtIfModule, PacketType::RegValue, ts,
                             {p.body[0], v.value_or(0), static_cast<std::uint16_t>(v.has_value())}});
        break;
      }
      case PacketType::RegWrite:
        if (p.body.size() == 2) write_register(kExtIfModule, p.body[0], p.body[1], cycle);
        break;
      default:
        break;
    }
    return;
  }
  DebugPacket fwd = p;
  fwd.src = kExtIfModule;
  fwd.timestamp = ts;
  send(ext, noc::RingLane::Data, fwd);
}

std::vector<DebugPacket> DebugFabric::take_host_output() { return std::exchange(host_out_, {}); }

void DebugFabric::deliver(std::size_t node, const DebugPacket& p, std::uint64_t cycle) {
  if (node == kExtIfModule) {
    if (p.dest == kBroadcast) return;
    if (is_event_type(p.type)) modules_.at(p.src).undelivered.pop_front();
    host_out_.push_back(p);
    return;
  }
  auto& m = modules_[node];
  const auto ts = static_cast<std::uint32_t>(cycle);
  switch (p.type) {
    case PacketType::Trigger:
      if (p.src == m.desc.id || !m.trigger_input || p.body.size() < 3) break;
      if (set_enabled(m, p.body[1] == static_cast<std::uint16_t>(TriggerAction::StartCollection), cycle,
                      CollectionChange::Cause::CrossTrigger)) {
        emit(m, cycle, PacketType::Trigger, {p.body[0], p.body[1], p.body[2], 1});
      }
      break;
    case PacketType::Discover:
      send(m, noc::RingLane::Data, descriptor_reply(m, cycle));
      break;
    case PacketType::RegRead: {
      if (p.body.size() != 1) break;
      const auto v = read_register(m.desc.id, p.body[0]);
      send(m, noc::RingLane::Data,
           DebugPacket{kExtIfModule, m.desc.id, PacketType::RegValue, ts,
                       {p.body[0], v.value_or(0), static_cast<std::uint16_t>(v.has_value())}});
      break;
    }
    case PacketType::RegWrite:
      if (p.body.size() == 2) write_register(m.desc.id, p.body[0], p.body[1], cycle);
      break;
    default:
      break;
  }
}

void DebugFabric::tick_ring(std::uint64_t cycle) {
  const auto n = modules_.size();
  std::vector<std::optional<noc::RingInjection>> offers(n);
  std::vector<std::size_t> lane_offered(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto lane : {noc::RingLane::Trigger, noc::RingLane::Data}) {
      const auto& box = modules_[i].out[lane_index(lane)];
      if (box.packets.empty()) continue;
      const auto& pkt = box.packets.front().flits;
      offers[i] = noc::RingInjection{{pkt[box.next], box.next + 1 == pkt.size()}, lane};
      lane_offered[i] = lane_index(lane);
      break;
    }
  }

  auto result = ring_.tick(offers);

  for (std::size_t i = 0; i < n; ++i) {
    if (!result.accepted[i]) continue;
    auto& box = modules_[i].out[lane_offered[i]];
    if (++box.next == box.packets.front().flits.size()) {
      if (const auto bc = box.packets.front().broadcast) broadcast_log_[*bc].tail_injected = cycle;
      box.packets.pop_front();
      box.next = 0;
    }
  }
  for (const auto& d : result.deliveries) deliver(d.node, parse_packet(d.flits), cycle);

  if ((cycle + 1) % kWatermarkInterval == 0) {
    // Anything emitted later carries a timestamp of at least cycle + 1.
    auto mark = static_cast<std::uint32_t>(std::min<std::uint64_t>(cycle + 1, 0xFFFF'FFFFu));
    for (const auto& m : modules_) {
      if (!m.undelivered.empty()) mark = std::min(mark, m.undelivered.front());
    }
    if (mark > last_watermark_) {
      last_watermark_ = mark;
      host_out_.push_back({kExtIfModule, kExtIfModule, PacketType::Watermark, static_cast<std::uint32_t>(cycle),
                           {hi16(mark), lo16(mark)}});
    }
  }
}

bool DebugFabric::idle() const {
  if (!ring_.idle()) return false;
  for (const auto& m : modules_) {
    for (const auto& box : m.out) {
      if (!box.packets.empty()) return false;
    }
  }
  return true;
}

}  // namespace tilesim::debug
