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
 * @file commands.hpp
 * @brief The `tilesim` subcommands as plain functions, so tests can call
 * them without spawning a process.
 *
 * Exit codes: 0 success, 1 internal error, 2 usage or validation error,
 * 3 load error (config, program, file I/O), 4 network error.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tilesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLoad = 3;
inline constexpr int kExitNetwork = 4;

struct GenOptions {
  std::string in;
  std::string out;
};

struct RunOptions {
  std::string config;
  std::vector<std::string> programs;  // "tile=<id>:<path>"
  std::uint64_t cycles = 0;
  std::optional<std::string> stats;
  std::optional<std::string> debug_listen;  // "host:port"
  std::uint64_t seed = 0;
  double traffic_rate = 0.0;
};

struct AttachOptions {
  std::string connect;
  std::optional<std::string> triggers;
  std::string out;
  std::uint32_t event_timeout_ms = 30000;
};

int cmd_gen(const GenOptions& o, std::ostream& err);
int cmd_run(const RunOptions& o, std::ostream& err);
int cmd_attach(const AttachOptions& o, std::ostream& err);

/// Parses "tile=<id>:<path>".
std::pair<std::uint32_t, std::string> parse_program_flag(const std::string& flag);

}  // namespace tilesim::cli
