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

/**
 * @file driver.hpp
 * @brief Serves one host session over a byte channel for one simulation run.
 *
 * Protocol flow:
 *   1. configuration: simulated time is frozen; each inbound control packet
 *      is handled and the debug ring runs until idle, so replies go out
 *      before the next request is read
 *   2. the host writes the external interface RUN register
 *   3. the system runs up to the cycle budget or until every core halted
 *   4. pending traces are flushed, the ring drains, the channel is closed
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <thread>

#include "tilesim/daemon/channel.hpp"
#include "tilesim/platform/system.hpp"

namespace tilesim::daemon {

struct SessionReport {
  bool ran = false;            // RUN was requested and the run took place
  bool host_detached = false;  // the host went away while we were still writing
  std::uint64_t cycles = 0;
  std::uint64_t frames_sent = 0;
};

/// `cancel` lets another thread abort the configuration phase.
SessionReport run_debug_session(platform::SystemInstance& sys, ByteChannel& channel, std::uint64_t max_cycles,
                                const std::atomic<bool>* cancel = nullptr);

/// Runs a session against an in-process system on a background thread and
/// hands out the host end of a loopback channel.
class LocalSimulation {
 public:
  LocalSimulation(platform::SystemInstance system, std::uint64_t max_cycles);
  ~LocalSimulation();
  LocalSimulation(const LocalSimulation&) = delete;
  LocalSimulation& operator=(const LocalSimulation&) = delete;

  /// The host end; call once.
  std::unique_ptr<ByteChannel> host_channel();
  /// Waits for the session to finish. Rethrows a simulator-side exception.
  SessionReport join();

  platform::SystemInstance& system() { return system_; }

 private:
  platform::SystemInstance system_;
  std::unique_ptr<ByteChannel> host_end_;
  std::unique_ptr<ByteChannel> sim_end_;
  std::atomic<bool> cancel_{false};
  std::thread worker_;
  SessionReport report_;
  std::exception_ptr error_;
  bool joined_ = false;
};

}  // namespace tilesim::daemon
