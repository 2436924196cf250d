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

#include "tilesim/platform/config.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tilesim/debug/fabric.hpp"
#include "tilesim/na/lsu.hpp"
#include "tilesim/pe/core.hpp"

namespace tilesim::platform {

using nlohmann::json;

namespace {

constexpr int kMaxTiles = 127;  // 1 + 2 * tiles debug modules must fit the 8-bit ring address
constexpr std::uint32_t kMinMemoryKib = 4;
constexpr std::uint32_t kMaxMemoryKib = 16 * 1024;

// Description field access with a path for error messages.
class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ValidationError(prefix_.empty() ? "$" : prefix_, "expected an object");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ValidationError(path(key), "missing field");
    return j_.at(key);
  }

  std::int64_t integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ValidationError(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ValidationError(path(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) throw ValidationError(path(key), "expected a boolean");
    return v.get<bool>();
  }

  Reader object(const std::string& key) const { return Reader(at(key), path(key)); }

  void only(std::initializer_list<const char*> keys) const {
    for (const auto& [k, _] : j_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
        throw ValidationError(path(k), "unknown field");
      }
    }
  }

 private:
  const json& j_;
  std::string prefix_;
};

template <typename T>
T in_range(const Reader& r, const std::string& key, std::int64_t lo, std::int64_t hi) {
  const auto v = r.integer(key);
  if (v < lo || v > hi) {
    throw ValidationError(r.path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<T>(v);
}

MemoryOrg parse_org(const std::string& s, const std::string& path) {
  if (s == "distributed") return MemoryOrg::Distributed;
  if (s == "pgas") return MemoryOrg::Pgas;
  throw ValidationError(path, "expected \"distributed\" or \"pgas\"");
}

}  // namespace

const char* to_string(MemoryOrg o) { return o == MemoryOrg::Pgas ? "pgas" : "distributed"; }

ValidationError::ValidationError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

void validate(const PlatformDescription& d) {
  if (d.schema_version != kSchemaVersion) throw ValidationError("schema_version", "unsupported version");
  if (d.pattern != "mesh") throw ValidationError("pattern", "only the mesh pattern is implemented");
  if (d.width < 1) throw ValidationError("width", "must be at least 1");
  if (d.height < 1) throw ValidationError("height", "must be at least 1");
  if (d.width * d.height > kMaxTiles) {
    throw ValidationError("width", "at most " + std::to_string(kMaxTiles) + " tiles supported");
  }
  if (d.cores != 1) throw ValidationError("tile.cores", "one core per tile");
  if (!na::is_power_of_two(d.memory_kib) || d.memory_kib < kMinMemoryKib || d.memory_kib > kMaxMemoryKib) {
    throw ValidationError("tile.memory_kib", "must be a power of two between 4 and 16384");
  }
  if (d.vcs < 3 || d.vcs > 32) throw ValidationError("noc.vcs", "must lie in [3, 32]");
  if (d.buffer_depth < 1 || d.buffer_depth > 1024) throw ValidationError("noc.buffer_depth", "must lie in [1, 1024]");
  if (d.flit_width != 32) throw ValidationError("noc.flit_width", "the data NoC is 32 bits wide");
  if (d.nocstat_window < 1 || d.nocstat_window > 0xFFFF) {
    throw ValidationError("debug.nocstat_window", "must lie in [1, 65535]");
  }
  if (d.org == MemoryOrg::Pgas) {
    if (!na::is_power_of_two(d.partition_kib) || d.partition_kib < 4) {
      throw ValidationError("pgas.partition_kib", "must be a power of two of at least 4");
    }
    if (d.partition_kib > d.memory_kib) {
      throw ValidationError("pgas.partition_kib", "partition larger than tile memory");
    }
    const auto span = static_cast<std::uint64_t>(d.partition_kib) * 1024 * d.width * d.height;
    if (span > pe::kMmioBase) throw ValidationError("pgas.partition_kib", "global space overlaps the MMIO window");
  } else if (d.partition_kib != 0) {
    throw ValidationError("pgas", "only valid with tile.org = \"pgas\"");
  }
}

PlatformDescription parse_description(const json& j) {
  const Reader top(j, "");
  top.only({"schema_version", "pattern", "width", "height", "tile", "noc", "debug", "pgas"});
  PlatformDescription d;
  d.schema_version = in_range<int>(top, "schema_version", 0, 1 << 30);
  d.pattern = top.string("pattern");
  d.width = in_range<int>(top, "width", -(1 << 30), 1 << 30);
  d.height = in_range<int>(top, "height", -(1 << 30), 1 << 30);

  const auto tile = top.object("tile");
  tile.only({"cores", "memory_kib", "org"});
  d.cores = in_range<int>(tile, "cores", 0, 1 << 30);
  d.memory_kib = in_range<std::uint32_t>(tile, "memory_kib", 0, 1 << 30);
  d.org = parse_org(tile.string("org"), tile.path("org"));

  const auto noc = top.object("noc");
  noc.only({"vcs", "buffer_depth", "flit_width"});
  d.vcs = in_range<int>(noc, "vcs", -(1 << 30), 1 << 30);
  d.buffer_depth = in_range<int>(noc, "buffer_depth", -(1 << 30), 1 << 30);
  d.flit_width = in_range<int>(noc, "flit_width", -(1 << 30), 1 << 30);

  const auto dbg = top.object("debug");
  dbg.only({"enabled", "nocstat_window"});
  d.debug_enabled = dbg.boolean("enabled");
  d.nocstat_window = dbg.has("nocstat_window") ? in_range<std::uint32_t>(dbg, "nocstat_window", 0, 1 << 30)
                                               : debug::kDefaultNocStatWindow;

  if (top.has("pgas")) {
    const auto pgas = top.object("pgas");
    pgas.only({"partition_kib"});
    d.partition_kib = in_range<std::uint32_t>(pgas, "partition_kib", 0, 1 << 30);
  } else if (d.org == MemoryOrg::Pgas) {
    throw ValidationError("pgas", "missing field");
  }
  validate(d);
  return d;
}

json to_json(const PlatformDescription& d) {
  json j = {
      {"schema_version", d.schema_version},
      {"pattern", d.pattern},
      {"width", d.width},
      {"height", d.height},
      {"tile", {{"cores", d.cores}, {"memory_kib", d.memory_kib}, {"org", to_string(d.org)}}},
      {"noc", {{"vcs", d.vcs}, {"buffer_depth", d.buffer_depth}, {"flit_width", d.flit_width}}},
      {"debug", {{"enabled", d.debug_enabled}, {"nocstat_window", d.nocstat_window}}},
  };
  if (d.org == MemoryOrg::Pgas) j["pgas"] = {{"partition_kib", d.partition_kib}};
  return j;
}

PlatformConfiguration map_description(const PlatformDescription& d) {
  validate(d);
  PlatformConfiguration c;
  c.width = d.width;
  c.height = d.height;
  c.vcs = d.vcs;
  c.buffer_depth = d.buffer_depth;
  c.flit_width = d.flit_width;
  c.debug_enabled = d.debug_enabled;
  c.nocstat_window = d.nocstat_window;

  const auto n = static_cast<std::uint32_t>(d.width * d.height);
  const auto mem = d.memory_kib * 1024;
  const auto partition = d.org == MemoryOrg::Pgas ? d.partition_kib * 1024 : 0;
  auto id_at = [&](int x, int y) -> std::optional<std::uint32_t> {
    if (x < 0 || y < 0 || x >= d.width || y >= d.height) return std::nullopt;
    return static_cast<std::uint32_t>(y * d.width + x);
  };

  for (std::uint32_t t = 0; t < n; ++t) {
    const int x = static_cast<int>(t) % d.width;
    const int y = static_cast<int>(t) / d.width;
    c.tiles.push_back({t, x, y, mem, d.org, t});
    c.routers.push_back({t, x, y, id_at(x, y - 1), id_at(x + 1, y), id_at(x, y + 1), id_at(x - 1, y), t});
    c.adapters.push_back({t, 16, 8, partition});
    c.memory_map.push_back({t, "local", 0, mem});
    c.memory_map.push_back({t, "mmio", pe::kMmioBase, pe::kMmioSize});
    if (partition != 0) c.memory_map.push_back({t, "global", t * partition, partition});
  }
  if (d.debug_enabled) c.debug_modules = debug::module_layout(d.width, d.height);
  return c;
}

namespace {

json opt_id(const std::optional<std::uint32_t>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field \"" + key + "\" has the wrong type");
  }
}

std::optional<std::uint32_t> opt_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  if (j.at(key).is_null()) return std::nullopt;
  return field<std::uint32_t>(j, key, where);
}

debug::ModuleType module_type(const std::string& s, const std::string& where) {
  if (s == "EXTIF") return debug::ModuleType::ExtIf;
  if (s == "CORE_TRACE") return debug::ModuleType::CoreTrace;
  if (s == "NOC_STAT") return debug::ModuleType::NocStat;
  throw ConfigError(where + ": unknown module type \"" + s + "\"");
}

}  // namespace

json to_json(const PlatformConfiguration& c) {
  json tiles = json::array();
  for (const auto& t : c.tiles) {
    tiles.push_back({{"id", t.id}, {"x", t.x}, {"y", t.y}, {"memory_bytes", t.memory_bytes},
                     {"org", to_string(t.org)}, {"router", t.router}});
  }
  json routers = json::array();
  for (const auto& r : c.routers) {
    routers.push_back({{"id", r.id}, {"x", r.x}, {"y", r.y},
                       {"ports", {{"north", opt_id(r.north)}, {"east", opt_id(r.east)},
                                  {"south", opt_id(r.south)}, {"west", opt_id(r.west)},
                                  {"local", r.local}}}});
  }
  json adapters = json::array();
  for (const auto& a : c.adapters) {
    adapters.push_back({{"tile", a.tile}, {"recv_queue_depth", a.recv_queue_depth},
                        {"max_dma_inflight", a.max_dma_inflight}, {"partition_bytes", a.partition_bytes}});
  }
  json modules = json::array();
  for (const auto& m : c.debug_modules) {
    modules.push_back({{"id", m.id}, {"type", debug::to_string(m.type)}, {"version", m.version},
                       {"attach", m.attach}});
  }
  json regions = json::array();
  for (const auto& r : c.memory_map) {
    regions.push_back({{"tile", r.tile}, {"kind", r.kind}, {"base", r.base}, {"size", r.size}});
  }
  return {
      {"schema_version", c.schema_version},
      {"mesh", {{"width", c.width}, {"height", c.height}}},
      {"noc", {{"vcs", c.vcs}, {"buffer_depth", c.buffer_depth}, {"flit_width", c.flit_width}}},
      {"tiles", tiles},
      {"routers", routers},
      {"network_adapters", adapters},
      {"debug", {{"enabled", c.debug_enabled}, {"nocstat_window", c.nocstat_window}, {"modules", modules}}},
      {"memory_map", regions},
  };
}

PlatformConfiguration parse_configuration(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  PlatformConfiguration c;
  c.schema_version = field<int>(j, "schema_version", "$");
  const auto& mesh = j.contains("mesh") ? j.at("mesh") : json();
  c.width = field<int>(mesh, "width", "mesh");
  c.height = field<int>(mesh, "height", "mesh");
  const auto& noc = j.contains("noc") ? j.at("noc") : json();
  c.vcs = field<int>(noc, "vcs", "noc");
  c.buffer_depth = field<int>(noc, "buffer_depth", "noc");
  c.flit_width = field<int>(noc, "flit_width", "noc");

  auto list = [&](const char* key) -> const json& {
    if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(std::string(key) + ": expected an array");
    return j.at(key);
  };
  for (const auto& t : list("tiles")) {
    const std::string w = "tiles[]";
    const auto org = field<std::string>(t, "org", w);
    if (org != "distributed" && org != "pgas") throw ConfigError(w + ": bad org \"" + org + "\"");
    c.tiles.push_back({field<std::uint32_t>(t, "id", w), field<int>(t, "x", w), field<int>(t, "y", w),
                       field<std::uint32_t>(t, "memory_bytes", w),
                       org == "pgas" ? MemoryOrg::Pgas : MemoryOrg::Distributed, field<std::uint32_t>(t, "router", w)});
  }
  for (const auto& r : list("routers")) {
    const std::string w = "routers[]";
    const auto& ports = r.contains("ports") ? r.at("ports") : json();
    if (!ports.is_object()) throw ConfigError(w + ": missing ports");
    c.routers.push_back({field<std::uint32_t>(r, "id", w), field<int>(r, "x", w), field<int>(r, "y", w),
                         opt_field(ports, "north", w), opt_field(ports, "east", w), opt_field(ports, "south", w),
                         opt_field(ports, "west", w), field<std::uint32_t>(ports, "local", w)});
  }
  for (const auto& a : list("network_adapters")) {
    const std::string w = "network_adapters[]";
    c.adapters.push_back({field<std::uint32_t>(a, "tile", w), field<std::uint32_t>(a, "recv_queue_depth", w),
                          field<std::uint32_t>(a, "max_dma_inflight", w), field<std::uint32_t>(a, "partition_bytes", w)});
  }
  const auto& dbg = j.contains("debug") ? j.at("debug") : json();
  c.debug_enabled = field<bool>(dbg, "enabled", "debug");
  c.nocstat_window = field<std::uint32_t>(dbg, "nocstat_window", "debug");
  if (!dbg.contains("modules") || !dbg.at("modules").is_array()) throw ConfigError("debug.modules: expected an array");
  for (const auto& m : dbg.at("modules")) {
    const std::string w = "debug.modules[]";
    const auto id = field<std::uint32_t>(m, "id", w);
    if (id > 0xFE) throw ConfigError(w + ": module id above 254");
    c.debug_modules.push_back({static_cast<debug::ModuleId>(id), module_type(field<std::string>(m, "type", w), w),
                               field<std::uint16_t>(m, "version", w), field<std::uint16_t>(m, "attach", w)});
  }
  for (const auto& r : list("memory_map")) {
    const std::string w = "memory_map[]";
    c.memory_map.push_back({field<std::uint32_t>(r, "tile", w), field<std::string>(r, "kind", w),
                            field<std::uint32_t>(r, "base", w), field<std::uint32_t>(r, "size", w)});
  }
  return c;
}

void check_configuration(const PlatformConfiguration& c) {
  if (c.schema_version != kSchemaVersion) throw ConfigError("unsupported schema_version");
  if (c.width < 1 || c.height < 1 || c.width * c.height > kMaxTiles) throw ConfigError("mesh: bad dimensions");
  if (c.vcs < 3 || c.vcs > 32) throw ConfigError("noc.vcs must lie in [3, 32]");
  if (c.buffer_depth < 1 || c.buffer_depth > 1024) throw ConfigError("noc.buffer_depth must lie in [1, 1024]");
  if (c.flit_width != 32) throw ConfigError("noc.flit_width must be 32");
  if (c.nocstat_window < 1 || c.nocstat_window > 0xFFFF) throw ConfigError("debug.nocstat_window out of range");

  const auto n = static_cast<std::uint32_t>(c.width * c.height);
  auto coord_name = [](int x, int y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; };

  // Tiles
  std::map<std::uint32_t, const TileConfig*> tiles;
  for (const auto& t : c.tiles) {
    if (!tiles.emplace(t.id, &t).second) throw ConfigError("tile " + std::to_string(t.id) + " defined twice");
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const int x = static_cast<int>(i) % c.width, y = static_cast<int>(i) / c.width;
    const auto it = tiles.find(i);
    if (it == tiles.end()) throw ConfigError("missing tile " + std::to_string(i) + " at " + coord_name(x, y));
    const auto& t = *it->second;
    if (t.x != x || t.y != y) throw ConfigError("tile " + std::to_string(i) + " not at " + coord_name(x, y));
    if (!na::is_power_of_two(t.memory_bytes) || t.memory_bytes < 4096 || t.memory_bytes > (16u << 20)) {
      throw ConfigError("tile " + std::to_string(i) + ": memory must be a power of two between 4 KiB and 16 MiB");
    }
  }
  if (tiles.size() != n) throw ConfigError("tile outside the mesh");

  // Routers
  std::map<std::pair<int, int>, const RouterConfig*> routers;
  std::set<std::uint32_t> router_ids;
  for (const auto& r : c.routers) {
    if (!routers.emplace(std::pair{r.x, r.y}, &r).second) throw ConfigError("two routers at " + coord_name(r.x, r.y));
    if (!router_ids.insert(r.id).second) throw ConfigError("router id " + std::to_string(r.id) + " reused");
  }
  auto id_at = [&](int x, int y) -> std::optional<std::uint32_t> {
    if (x < 0 || y < 0 || x >= c.width || y >= c.height) return std::nullopt;
    return static_cast<std::uint32_t>(y * c.width + x);
  };
  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      const auto it = routers.find({x, y});
      if (it == routers.end()) throw ConfigError("missing router " + coord_name(x, y));
      const auto& r = *it->second;
      const auto where = "router " + coord_name(x, y);
      if (r.id != *id_at(x, y)) throw ConfigError(where + ": id must be " + std::to_string(*id_at(x, y)));
      const std::array<std::pair<const char*, std::pair<std::optional<std::uint32_t>, std::optional<std::uint32_t>>>, 4>
          ports{{{"north", {r.north, id_at(x, y - 1)}},
                 {"east", {r.east, id_at(x + 1, y)}},
                 {"south", {r.south, id_at(x, y + 1)}},
                 {"west", {r.west, id_at(x - 1, y)}}}};
      for (const auto& [name, pair] : ports) {
        if (pair.first && *pair.first >= n) {
          throw ConfigError(where + ": " + name + " port references unknown router " + std::to_string(*pair.first));
        }
        if (pair.first != pair.second) throw ConfigError(where + ": " + name + " port does not match the mesh");
      }
      if (r.local != r.id || tiles.at(r.local)->router != r.id) {
        throw ConfigError(where + ": local port must attach tile " + std::to_string(r.id));
      }
    }
  }
  if (routers.size() != n) throw ConfigError("router outside the mesh");

  // Network adapters
  std::set<std::uint32_t> na_tiles;
  for (const auto& a : c.adapters) {
    const auto where = "network adapter of tile " + std::to_string(a.tile);
    if (a.tile >= n) throw ConfigError(where + ": unknown tile");
    if (!na_tiles.insert(a.tile).second) throw ConfigError(where + ": defined twice");
    if (a.recv_queue_depth < 1 || a.recv_queue_depth > 0xFFFF) throw ConfigError(where + ": bad recv_queue_depth");
    if (a.max_dma_inflight < 1 || a.max_dma_inflight > 8) throw ConfigError(where + ": max_dma_inflight must lie in [1, 8]");
    const auto& t = *tiles.at(a.tile);
    if (t.org == MemoryOrg::Pgas) {
      if (!na::is_power_of_two(a.partition_bytes) || a.partition_bytes < 4096 || a.partition_bytes > t.memory_bytes) {
        throw ConfigError(where + ": bad PGAS partition");
      }
    } else if (a.partition_bytes != 0) {
      throw ConfigError(where + ": partition on a distributed-memory tile");
    }
  }
  if (na_tiles.size() != n) throw ConfigError("every tile needs a network adapter");
  for (const auto& a : c.adapters) {
    if (a.partition_bytes != c.adapters.front().partition_bytes) throw ConfigError("PGAS partitions must be uniform");
  }

  // Debug modules
  if (c.debug_enabled) {
    if (c.debug_modules != debug::module_layout(c.width, c.height)) {
      throw ConfigError("debug.modules does not match the module addressing of this mesh");
    }
  } else if (!c.debug_modules.empty()) {
    throw ConfigError("debug.modules listed while debug is disabled");
  }

  // Memory map
  struct Span {
    std::uint64_t lo, hi;
    std::string what;
  };
  std::map<std::uint32_t, std::vector<Span>> per_tile;
  std::vector<Span> global;
  for (const auto& r : c.memory_map) {
    const auto what = "memory region " + r.kind + " of tile " + std::to_string(r.tile);
    if (r.tile >= n) throw ConfigError(what + ": unknown tile");
    if (r.size == 0) throw ConfigError(what + ": empty");
    const Span s{r.base, static_cast<std::uint64_t>(r.base) + r.size, what};
    if (s.hi > (1ull << 32)) throw ConfigError(what + ": beyond the 32-bit address space");
    const auto& t = *tiles.at(r.tile);
    if (r.kind == "local") {
      if (r.base != 0 || r.size != t.memory_bytes) throw ConfigError(what + ": must cover [0, memory_bytes)");
      per_tile[r.tile].push_back(s);
    } else if (r.kind == "mmio") {
      if (r.base != pe::kMmioBase || r.size != pe::kMmioSize) throw ConfigError(what + ": must be the NA window");
      per_tile[r.tile].push_back(s);
    } else if (r.kind == "global") {
      const auto part = c.adapters.front().partition_bytes;
      if (t.org != MemoryOrg::Pgas) throw ConfigError(what + ": distributed-memory tile");
      if (r.size != part || r.base != r.tile * part) throw ConfigError(what + ": must be the tile's partition");
      global.push_back(s);
    } else {
      throw ConfigError(what + ": unknown kind");
    }
  }
  auto no_overlap = [](std::vector<Span> v) {
    std::sort(v.begin(), v.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].lo < v[i - 1].hi) throw ConfigError(v[i - 1].what + " overlaps " + v[i].what);
    }
  };
  for (std::uint32_t t = 0; t < n; ++t) {
    const auto& v = per_tile[t];
    const auto locals = std::count_if(v.begin(), v.end(), [](const Span& s) { return s.lo == 0; });
    if (v.size() != 2 || locals != 1) throw ConfigError("tile " + std::to_string(t) + " needs one local and one mmio region");
    no_overlap(v);
  }
  if (c.tiles.front().org == MemoryOrg::Pgas) {
    if (global.size() != n) throw ConfigError("every PGAS tile needs one global region");
    for (const auto& s : global) {
      if (s.hi > pe::kMmioBase) throw ConfigError(s.what + " overlaps the MMIO window");
    }
    no_overlap(global);
  }
  for (const auto& t : c.tiles) {
    if (t.org != c.tiles.front().org) throw ConfigError("mixed memory organisations are not supported");
  }
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace tilesim::platform
