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

#include "tilesim/daemon/driver.hpp"

#include <array>
#include <stdexcept>
#include <vector>

#include "tilesim/debug/packet.hpp"

namespace tilesim::daemon {

namespace {

constexpr std::uint64_t kSettleLimit = 1'000'000;

class Pump {
 public:
  Pump(platform::SystemInstance& sys, ByteChannel& ch, SessionReport& report)
      : sys_(sys), fabric_(*sys.fabric()), ch_(ch), report_(report) {}

  void flush_output() {
    for (const auto& p : fabric_.take_host_output()) {
      if (report_.host_detached) continue;
      try {
        ch_.write(debug::extif_frame(p));
        ++report_.frames_sent;
      } catch (const ChannelClosed&) {
        report_.host_detached = true;
      }
    }
  }

  // Runs the ring with simulated time frozen until nothing is in flight.
  void settle() {
    for (std::uint64_t i = 0; !fabric_.idle(); ++i) {
      if (i == kSettleLimit) throw std::logic_error("debug ring failed to drain");
      fabric_.tick_ring(sys_.cycle());
      flush_output();
    }
    flush_output();
  }

  // Returns false at end of stream.
  bool read_inbound(std::chrono::milliseconds timeout) {
    std::array<std::uint8_t, 4096> buf{};
    const auto n = ch_.read(buf, timeout);
    if (!n) return true;
    if (*n == 0) return false;
    inbox_.insert(inbox_.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(*n));
    std::size_t off = 0;
    while (auto f = debug::next_frame(std::span<const std::uint8_t>(inbox_).subspan(off))) {
      fabric_.host_send(f->packet, sys_.cycle());
      off += f->consumed;
    }
    inbox_.erase(inbox_.begin(), inbox_.begin() + static_cast<std::ptrdiff_t>(off));
    return true;
  }

 private:
  platform::SystemInstance& sys_;
  debug::DebugFabric& fabric_;
  ByteChannel& ch_;
  SessionReport& report_;
  std::vector<std::uint8_t> inbox_;
};

}  // namespace

SessionReport run_debug_session(platform::SystemInstance& sys, ByteChannel& channel, std::uint64_t max_cycles,
                                const std::atomic<bool>* cancel) {
  if (sys.fabric() == nullptr) throw std::invalid_argument("debug session on a system without debug fabric");
  SessionReport report;
  Pump pump(sys, channel, report);
  auto& fabric = *sys.fabric();

  while (!fabric.run_requested()) {
    if (cancel && cancel->load()) {
      channel.close();
      return report;
    }
    if (!pump.read_inbound(std::chrono::milliseconds(50))) {
      channel.close();
      return report;
    }
    pump.settle();
  }

  const auto start = sys.cycle();
  bool inbound_open = true;
  while (sys.cycle() - start < max_cycles && !sys.all_halted()) {
    sys.tick();
    pump.flush_output();
    if (inbound_open) inbound_open = pump.read_inbound(std::chrono::milliseconds(0));
  }
  report.ran = true;
  report.cycles = sys.cycle() - start;
  fabric.flush(sys.cycle());
  pump.settle();
  channel.close();
  return report;
}

LocalSimulation::LocalSimulation(platform::SystemInstance system, std::uint64_t max_cycles)
    : system_(std::move(system)) {
  auto [host, sim] = make_loopback_pair();
  host_end_ = std::move(host);
  sim_end_ = std::move(sim);
  worker_ = std::thread([this, max_cycles] {
    try {
      report_ = run_debug_session(system_, *sim_end_, max_cycles, &cancel_);
    } catch (...) {
      error_ = std::current_exception();
      sim_end_->close();
    }
  });
}

LocalSimulation::~LocalSimulation() {
  cancel_ = true;
  if (worker_.joinable()) worker_.join();
}

std::unique_ptr<ByteChannel> LocalSimulation::host_channel() {
  if (!host_end_) throw std::logic_error("host channel already taken");
  return std::move(host_end_);
}

SessionReport LocalSimulation::join() {
  if (!joined_) {
    worker_.join();
    joined_ = true;
  }
  if (error_) std::rethrow_exception(error_);
  return report_;
}

}  // namespace tilesim::daemon
