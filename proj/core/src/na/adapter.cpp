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

#include "tilesim/na/adapter.hpp"

#include <algorithm>
#include <string>

#include "tilesim/na/lsu.hpp"
#include "tilesim/na/mmio.hpp"

namespace tilesim::na {

namespace {

constexpr std::uint32_t kSyntheticFlag = 1u << 31;
constexpr std::uint32_t kWriteFlag = 1u << 31;
constexpr std::uint32_t kRespError = 1u << 31;

std::uint32_t op_word(bool flag31, std::uint8_t tag, std::uint8_t segment, std::uint32_t nwords) {
  return (flag31 ? (1u << 31) : 0u) | (static_cast<std::uint32_t>(tag & 0x7F) << 24) |
         (static_cast<std::uint32_t>(segment) << 16) | (nwords & 0xFFFF);
}

bool range_ok(std::uint32_t addr, std::uint32_t words, std::uint32_t mem_bytes) {
  if (addr % 4 != 0) return false;
  return static_cast<std::uint64_t>(addr) + static_cast<std::uint64_t>(words) * 4 <= mem_bytes;
}

}  // namespace

noc::Packet message_packet(TileId src_tile, std::uint8_t src_port, Endpoint dst,
                           std::span<const std::uint32_t> payload, bool synthetic) {
  noc::Packet p{noc::TrafficClass::Msg, src_tile, dst.tile, {}};
  p.body.reserve(payload.size() + 1);
  p.body.push_back((synthetic ? kSyntheticFlag : 0u) | (static_cast<std::uint32_t>(src_port) << 24) |
                   (static_cast<std::uint32_t>(dst.port) << 16) |
                   static_cast<std::uint32_t>(payload.size()));
  p.body.insert(p.body.end(), payload.begin(), payload.end());
  return p;
}

NetworkAdapter::NetworkAdapter(NaParams params) : params_(params), dma_(params.max_dma_inflight) {
  if (params.num_tiles == 0 || params.tile >= params.num_tiles) {
    throw std::invalid_argument("network adapter tile id out of range");
  }
  if (params.max_dma_inflight == 0 || params.max_dma_inflight > 8) {
    throw std::invalid_argument("between 1 and 8 DMA transactions supported");
  }
  if (params.partition_bytes != 0 &&
      (!is_power_of_two(params.partition_bytes) || params.partition_bytes < 4096)) {
    throw std::invalid_argument("PGAS partition must be a power of two of at least 4 KiB");
  }
}

void NetworkAdapter::enqueue(const noc::Packet& p, bool core_send) {
  auto flits = noc::packetize(p);
  outbound_[static_cast<std::size_t>(p.cls)].push_back({std::move(flits), 0, core_send});
}

SendStatus NetworkAdapter::send(std::uint8_t src_port, Endpoint dst,
                                std::span<const std::uint32_t> payload) {
  if (send_pending_) return SendStatus::Busy;
  if (payload.size() > kMaxMessageWords) return SendStatus::LenRange;
  if (dst.tile >= params_.num_tiles || dst.port >= kNumEndpointPorts || src_port >= kNumEndpointPorts) {
    return SendStatus::BadDest;
  }
  enqueue(message_packet(params_.tile, src_port, dst, payload), true);
  send_pending_ = true;
  ++stats_.messages_sent;
  return SendStatus::Ok;
}

void NetworkAdapter::send_synthetic(TileId dst, std::span<const std::uint32_t> payload) {
  if (dst >= params_.num_tiles) throw std::invalid_argument("synthetic destination out of range");
  enqueue(message_packet(params_.tile, 0, Endpoint{dst, 0}, payload, true));
  ++stats_.synthetic_sent;
}

std::size_t NetworkAdapter::dma_in_flight() const {
  return static_cast<std::size_t>(std::count_if(dma_.begin(), dma_.end(), [](const DmaSlot& s) { return s.active; }));
}

void NetworkAdapter::issue_request(TileId remote, bool write, std::uint8_t tag, std::uint8_t segment,
                                   std::uint32_t remote_addr, std::span<const std::uint32_t> data,
                                   std::uint32_t nwords) {
  noc::Packet p{noc::TrafficClass::Req, params_.tile, remote, {}};
  p.body.push_back(op_word(write, tag, segment, nwords));
  p.body.push_back(remote_addr);
  if (write) p.body.insert(p.body.end(), data.begin(), data.end());
  enqueue(p);
  outstanding_[remote].push_back({tag, segment, write});
}

std::uint32_t NetworkAdapter::dma_start(DmaDir dir, std::uint32_t local_addr, TileId remote_tile,
                                        std::uint32_t remote_addr, std::uint32_t len_words,
                                        std::span<const std::uint32_t> mem) {
  if (len_words > kMaxDmaWords) throw DmaRangeError("DMA length above 1024 words");
  if (remote_tile >= params_.num_tiles) throw DmaRangeError("DMA remote tile out of range");
  if (!range_ok(local_addr, len_words, params_.memory_bytes) ||
      !range_ok(remote_addr, len_words, params_.memory_bytes)) {
    throw DmaRangeError("DMA address range unaligned or outside tile memory");
  }
  const auto it = std::find_if(dma_.begin(), dma_.end(), [](const DmaSlot& s) { return !s.active; });
  if (it == dma_.end()) throw NoFreeSlot();
  const auto slot = static_cast<std::uint8_t>(it - dma_.begin());

  dma_done_mask_ &= ~(1u << slot);
  dma_error_mask_ &= ~(1u << slot);
  if (len_words == 0) {
    dma_done_mask_ |= 1u << slot;
    ++stats_.dma_completed;
    events_.push_back({NaEvent::Kind::DmaDone, slot, remote_tile, 0});
    return slot;
  }

  auto& s = *it;
  s = DmaSlot{true, dir, local_addr, remote_tile, len_words,
              (len_words + kDmaSegmentWords - 1) / kDmaSegmentWords, 0};
  for (std::uint32_t seg = 0; seg < s.segments; ++seg) {
    const auto first = seg * kDmaSegmentWords;
    const auto n = std::min(kDmaSegmentWords, len_words - first);
    const bool write = dir == DmaDir::WriteRemote;
    std::span<const std::uint32_t> data;
    if (write) data = mem.subspan(local_addr / 4 + first, n);
    issue_request(remote_tile, write, slot, static_cast<std::uint8_t>(seg), remote_addr + first * 4, data, n);
  }
  return slot;
}

std::optional<Message> NetworkAdapter::receive(std::uint8_t port) {
  auto& q = recv_.at(port);
  if (q.empty()) return std::nullopt;
  Message m = std::move(q.front());
  q.pop_front();
  recv_cursor_[port] = 0;
  return m;
}

pe::BusResult NetworkAdapter::recv_word(std::uint8_t port) {
  auto& q = recv_[port];
  if (q.empty()) return pe::BusResult::stall();
  auto& cursor = recv_cursor_[port];
  const auto& m = q.front();
  const auto len = static_cast<std::uint32_t>(m.payload.size());
  std::uint32_t value = 0;
  if (cursor == 0) {
    value = (m.src_tile << 16) | (static_cast<std::uint32_t>(m.src_port) << 8) | len;
  } else {
    value = m.payload[cursor - 1];
  }
  if (cursor == len) {
    q.pop_front();
    cursor = 0;
  } else {
    ++cursor;
  }
  return pe::BusResult::ok(value);
}

pe::BusResult NetworkAdapter::start_from_registers(std::span<const std::uint32_t> mem) {
  dma_start_errors_ = 0;
  try {
    dma_last_start_ = dma_start(static_cast<DmaDir>(dma_dir_ & 1u), dma_local_addr_, dma_remote_tile_,
                                dma_remote_addr_, dma_len_, mem);
  } catch (const NoFreeSlot&) {
    dma_last_start_ = reg::kDmaStartFailed;
    dma_start_errors_ = reg::kDmaErrNoSlot;
  } catch (const DmaRangeError&) {
    dma_last_start_ = reg::kDmaStartFailed;
    dma_start_errors_ = reg::kDmaErrRange;
  }
  return pe::BusResult::ok();
}

pe::BusResult NetworkAdapter::mmio_access(std::uint32_t offset, bool is_write, std::uint32_t value,
                                          std::span<const std::uint32_t> mem) {
  using namespace reg;
  if (offset % 4 != 0) return pe::BusResult::fault();

  if (offset >= kRecvStatus && offset < kRecvWord) {
    const auto port = static_cast<std::uint8_t>((offset - kRecvStatus) / 4);
    if (is_write) {
      overflow_[port] = false;
      return pe::BusResult::ok();
    }
    const auto n = static_cast<std::uint32_t>(std::min<std::size_t>(recv_[port].size(), kRecvCountMask));
    return pe::BusResult::ok(n | (overflow_[port] ? kRecvOverflow : 0u));
  }
  if (offset >= kRecvWord && offset < kRecvWord + 4 * kNumEndpointPorts) {
    if (is_write) return pe::BusResult::fault();
    return recv_word(static_cast<std::uint8_t>((offset - kRecvWord) / 4));
  }

  auto rw = [&](std::uint32_t& r) {
    if (is_write) r = value;
    return pe::BusResult::ok(r);
  };
  switch (offset) {
    case kSendDestTile: return rw(send_dest_tile_);
    case kSendDestPort: return rw(send_dest_port_);
    case kSendSrcPort: return rw(send_src_port_);
    case kSendLen: return rw(send_len_);
    case kSendAddr: return rw(send_addr_);
    case kSendGoStatus: {
      if (!is_write) {
        return pe::BusResult::ok((send_pending_ ? kStatusSendBusy : 0u) | send_errors_ | sticky_status_);
      }
      send_errors_ = 0;
      if (send_pending_) {
        send_errors_ = kStatusErrBusy;
        return pe::BusResult::ok();
      }
      if (send_len_ > kMaxMessageWords) {
        send_errors_ = kStatusErrLen;
        return pe::BusResult::ok();
      }
      if (send_dest_tile_ >= params_.num_tiles || send_dest_port_ >= kNumEndpointPorts ||
          send_src_port_ >= kNumEndpointPorts || !range_ok(send_addr_, send_len_, params_.memory_bytes)) {
        send_errors_ = kStatusErrDest;
        return pe::BusResult::ok();
      }
      const auto payload = mem.subspan(send_addr_ / 4, send_len_);
      send(static_cast<std::uint8_t>(send_src_port_),
           Endpoint{send_dest_tile_, static_cast<std::uint8_t>(send_dest_port_)}, payload);
      return pe::BusResult::ok();
    }
    case kDmaLocalAddr: return rw(dma_local_addr_);
    case kDmaRemoteTile: return rw(dma_remote_tile_);
    case kDmaRemoteAddr: return rw(dma_remote_addr_);
    case kDmaLen: return rw(dma_len_);
    case kDmaDir: return rw(dma_dir_);
    case kDmaStart:
      if (is_write) return start_from_registers(mem);
      return pe::BusResult::ok(dma_last_start_);
    case kDmaStatus: {
      if (is_write) {
        dma_done_mask_ &= ~(value & 0xFF);
        return pe::BusResult::ok();
      }
      std::uint32_t busy = 0;
      for (std::size_t i = 0; i < dma_.size(); ++i) busy |= dma_[i].active ? (1u << i) : 0u;
      return pe::BusResult::ok((dma_done_mask_ << kDmaDoneShift) | (busy << kDmaBusyShift) |
                               dma_start_errors_ | (dma_error_mask_ != 0 ? kDmaErrRemote : 0u));
    }
    case kPgasPartition:
      if (is_write) return pe::BusResult::fault();
      return pe::BusResult::ok(params_.partition_bytes);
    case kTileId:
      if (is_write) return pe::BusResult::fault();
      return pe::BusResult::ok(params_.tile);
    case kNumTiles:
      if (is_write) return pe::BusResult::fault();
      return pe::BusResult::ok(params_.num_tiles);
    default:
      return pe::BusResult::fault();
  }
}

pe::BusResult NetworkAdapter::pgas_access(std::uint32_t addr, bool is_write, std::uint32_t value,
                                          std::span<std::uint32_t> mem) {
  if (params_.partition_bytes == 0) throw std::logic_error("PGAS access on a distributed-memory tile");
  const auto t = lsu_translate(addr, params_.tile, params_.partition_bytes, params_.num_tiles);
  switch (t.kind) {
    case Translation::Kind::Fault:
      return pe::BusResult::fault();
    case Translation::Kind::Local: {
      const auto word = t.offset / 4;
      if (word >= mem.size()) return pe::BusResult::fault();
      if (is_write) mem[word] = value;
      return pe::BusResult::ok(is_write ? 0 : mem[word]);
    }
    case Translation::Kind::Remote:
      break;
  }
  if (pgas_) {
    if (!pgas_->ready) return pe::BusResult::stall();
    if (pgas_->addr != addr || pgas_->write != is_write) {
      throw std::logic_error("core retried a different access while a PGAS access was pending");
    }
    const auto v = pgas_->value;
    pgas_.reset();
    return pe::BusResult::ok(v);
  }
  const std::array<std::uint32_t, 1> data{value};
  issue_request(t.tile, is_write, kPgasTag, 0, t.offset, data, 1);
  pgas_ = PgasPending{addr, is_write, false, 0};
  return pe::BusResult::stall();
}

std::optional<noc::Flit> NetworkAdapter::next_injection(const noc::MeshNetwork& net) {
  for (std::size_t k = 0; k < noc::kNumClasses; ++k) {
    const auto c = (inject_rr_ + k) % noc::kNumClasses;
    auto& q = outbound_[c];
    if (q.empty() || !net.can_inject(params_.tile, static_cast<int>(c))) continue;
    auto& pkt = q.front();
    const auto flit = pkt.flits[pkt.next++];
    if (pkt.next == pkt.flits.size()) {
      if (pkt.core_send) send_pending_ = false;
      ++stats_.packets_injected;
      q.pop_front();
    }
    inject_rr_ = (c + 1) % noc::kNumClasses;
    return flit;
  }
  return std::nullopt;
}

void NetworkAdapter::on_ejected(const noc::Flit& flit, std::span<std::uint32_t> mem) {
  if (flit.vc >= noc::kNumClasses) throw noc::BadPacket("ejected flit on an unused VC");
  auto& buf = reassembly_[flit.vc];
  buf.push_back(flit);
  if (!flit.is_tail()) return;
  const auto packet = noc::depacketize(buf);
  buf.clear();
  deliver(packet, mem);
}

void NetworkAdapter::deliver(const noc::Packet& packet, std::span<std::uint32_t> mem) {
  if (packet.dst != params_.tile) throw noc::BadPacket("packet delivered to the wrong tile");
  switch (packet.cls) {
    case noc::TrafficClass::Msg: deliver_message(packet); break;
    case noc::TrafficClass::Req: service_request(packet, mem); break;
    case noc::TrafficClass::Resp: complete_response(packet, mem); break;
  }
}

void NetworkAdapter::deliver_message(const noc::Packet& p) {
  if (p.body.empty()) throw noc::BadPacket("MSG packet without descriptor");
  const auto desc = p.body.front();
  if (desc & kSyntheticFlag) {
    ++stats_.synthetic_received;
    return;
  }
  const auto src_port = static_cast<std::uint8_t>((desc >> 24) & 0x7F);
  const auto dst_port = (desc >> 16) & 0xFF;
  const auto len = desc & 0xFFFF;
  if (len + 1 != p.body.size()) throw noc::BadPacket("MSG length does not match its body");
  if (dst_port >= kNumEndpointPorts) {
    sticky_status_ |= reg::kStatusUnknownPort;
    ++stats_.messages_dropped;
    events_.push_back({NaEvent::Kind::UnknownPort, p.src, dst_port, 0});
    return;
  }
  auto& q = recv_[dst_port];
  if (q.size() >= params_.recv_queue_depth) {
    overflow_[dst_port] = true;
    sticky_status_ |= reg::kStatusRecvOverflow;
    ++stats_.messages_dropped;
    return;
  }
  q.push_back({p.src, src_port, std::vector<std::uint32_t>(p.body.begin() + 1, p.body.end())});
  ++stats_.messages_received;
}

void NetworkAdapter::service_request(const noc::Packet& p, std::span<std::uint32_t> mem) {
  if (p.body.size() < 2) throw noc::BadPacket("REQ packet too short");
  const auto op = p.body[0];
  const auto addr = p.body[1];
  const bool write = (op & kWriteFlag) != 0;
  const auto tag = static_cast<std::uint8_t>((op >> 24) & 0x7F);
  const auto segment = static_cast<std::uint8_t>((op >> 16) & 0xFF);
  const auto nwords = op & 0xFFFF;
  ++stats_.requests_serviced;

  noc::Packet resp{noc::TrafficClass::Resp, params_.tile, p.src, {}};
  const bool ok = nwords <= kDmaSegmentWords && range_ok(addr, nwords, params_.memory_bytes) &&
                  static_cast<std::size_t>(addr / 4) + nwords <= mem.size();
  if (write) {
    if (p.body.size() != nwords + 2) throw noc::BadPacket("REQ write length mismatch");
    if (ok) std::copy(p.body.begin() + 2, p.body.end(), mem.begin() + addr / 4);
  } else {
    resp.body.push_back(op_word(!ok, tag, segment, ok ? nwords : 0));
    if (ok) resp.body.insert(resp.body.end(), mem.begin() + addr / 4, mem.begin() + addr / 4 + nwords);
  }
  enqueue(resp);
}

void NetworkAdapter::complete_response(const noc::Packet& p, std::span<std::uint32_t> mem) {
  auto& fifo = outstanding_[p.src];
  if (fifo.empty()) throw noc::BadPacket("unsolicited RESP from tile " + std::to_string(p.src));
  const auto pending = fifo.front();
  fifo.pop_front();
  if (fifo.empty()) outstanding_.erase(p.src);

  bool error = false;
  std::span<const std::uint32_t> data;
  if (pending.write) {
    if (!p.body.empty()) throw noc::BadPacket("write acknowledgement carries data");
  } else {
    if (p.body.empty()) throw noc::BadPacket("read response without header");
    const auto op = p.body[0];
    if (((op >> 24) & 0x7F) != pending.tag || ((op >> 16) & 0xFF) != pending.segment) {
      throw noc::BadPacket("read response out of order");
    }
    error = (op & kRespError) != 0;
    data = std::span<const std::uint32_t>(p.body).subspan(1);
  }

  if (pending.tag == kPgasTag) {
    if (!pgas_) throw noc::BadPacket("PGAS response without a pending access");
    pgas_->ready = true;
    pgas_->value = (!pending.write && !data.empty()) ? data[0] : 0;
    return;
  }

  auto& slot = dma_.at(pending.tag);
  if (!slot.active) throw noc::BadPacket("response for an idle DMA slot");
  if (error) dma_error_mask_ |= 1u << pending.tag;
  if (!pending.write && !data.empty()) {
    const auto first = slot.local_addr / 4 + pending.segment * kDmaSegmentWords;
    std::copy(data.begin(), data.end(), mem.begin() + first);
  }
  finish_segment(pending.tag);
}

void NetworkAdapter::finish_segment(std::uint8_t slot_id) {
  auto& slot = dma_[slot_id];
  if (++slot.segments_done < slot.segments) return;
  slot.active = false;
  dma_done_mask_ |= 1u << slot_id;
  ++stats_.dma_completed;
  events_.push_back({NaEvent::Kind::DmaDone, slot_id, slot.remote_tile, slot.len});
}

bool NetworkAdapter::idle() const {
  for (const auto& q : outbound_) {
    if (!q.empty()) return false;
  }
  for (const auto& r : reassembly_) {
    if (!r.empty()) return false;
  }
  return outstanding_.empty() && !pgas_.has_value();
}

}  // namespace tilesim::na
