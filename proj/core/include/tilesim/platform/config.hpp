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
 * @file config.hpp
 * @brief Platform description (pattern level) and configuration (explicit).
 *
 * Both are JSON documents. Serialization is canonical: keys sorted, two-space
 * indentation, integers only, trailing newline. docs/schemas.md describes the
 * fields.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/debug/packet.hpp"

namespace tilesim::platform {

inline constexpr int kSchemaVersion = 1;

enum class MemoryOrg : std::uint8_t { Distributed, Pgas };

const char* to_string(MemoryOrg o);

struct PlatformDescription {
  int schema_version = kSchemaVersion;
  std::string pattern = "mesh";
  int width = 1;
  int height = 1;
  int cores = 1;
  std::uint32_t memory_kib = 64;
  MemoryOrg org = MemoryOrg::Distributed;
  int vcs = 3;
  int buffer_depth = 4;
  int flit_width = 32;
  bool debug_enabled = true;
  std::uint32_t nocstat_window = 256;
  std::uint32_t partition_kib = 0;
  friend bool operator==(const PlatformDescription&, const PlatformDescription&) = default;
};

/// Carries the dotted path of the offending field, e.g. "noc.vcs".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates; throws ValidationError.
PlatformDescription parse_description(const nlohmann::json& j);
void validate(const PlatformDescription& d);
nlohmann::json to_json(const PlatformDescription& d);

struct TileConfig {
  std::uint32_t id = 0;
  int x = 0;
  int y = 0;
  std::uint32_t memory_bytes = 0;
  MemoryOrg org = MemoryOrg::Distributed;
  std::uint32_t router = 0;
  friend bool operator==(const TileConfig&, const TileConfig&) = default;
};

/// Neighbour router ids per mesh port; `local` is the attached tile.
struct RouterConfig {
  std::uint32_t id = 0;
  int x = 0;
  int y = 0;
  std::optional<std::uint32_t> north, east, south, west;
  std::uint32_t local = 0;
  friend bool operator==(const RouterConfig&, const RouterConfig&) = default;
};

struct AdapterConfig {
  std::uint32_t tile = 0;
  std::uint32_t recv_queue_depth = 16;
  std::uint32_t max_dma_inflight = 8;
  std::uint32_t partition_bytes = 0;
  friend bool operator==(const AdapterConfig&, const AdapterConfig&) = default;
};

struct MemoryRegion {
  std::uint32_t tile = 0;
  std::string kind;  // "local", "mmio" or "global"
  std::uint32_t base = 0;
  std::uint32_t size = 0;
  friend bool operator==(const MemoryRegion&, const MemoryRegion&) = default;
};

struct PlatformConfiguration {
  int schema_version = kSchemaVersion;
  int width = 1;
  int height = 1;
  int vcs = 3;
  int buffer_depth = 4;
  int flit_width = 32;
  std::vector<TileConfig> tiles;
  std::vector<RouterConfig> routers;
  std::vector<AdapterConfig> adapters;
  bool debug_enabled = true;
  std::uint32_t nocstat_window = 256;
  std::vector<debug::ModuleDescriptor> debug_modules;
  std::vector<MemoryRegion> memory_map;
  friend bool operator==(const PlatformConfiguration&, const PlatformConfiguration&) = default;
};

PlatformConfiguration map_description(const PlatformDescription& d);

nlohmann::json to_json(const PlatformConfiguration& c);
/// Structural parse only; throws ConfigError on missing or mistyped fields.
PlatformConfiguration parse_configuration(const nlohmann::json& j);
/// Consistency checks; throws ConfigError.
void check_configuration(const PlatformConfiguration& c);

/// Canonical text form used for golden files.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace tilesim::platform
