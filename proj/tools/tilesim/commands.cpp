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

#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tilesim/daemon/channel.hpp"
#include "tilesim/daemon/driver.hpp"
#include "tilesim/host/decode.hpp"
#include "tilesim/host/merge.hpp"
#include "tilesim/host/session.hpp"
#include "tilesim/host/trigger_json.hpp"
#include "tilesim/pe/assembler.hpp"
#include "tilesim/platform/config.hpp"
#include "tilesim/platform/system.hpp"

namespace tilesim::cli {

namespace {

constexpr std::uint64_t kMaxDebugCycles = 1ull << 32;

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path);
  out << text;
  if (!out.flush()) throw LoadError("cannot write " + path);
}

}  // namespace

std::pair<std::uint32_t, std::string> parse_program_flag(const std::string& flag) {
  const auto colon = flag.find(':');
  if (flag.rfind("tile=", 0) != 0 || colon == std::string::npos || colon == 5 || colon + 1 == flag.size()) {
    throw std::invalid_argument("expected tile=<id>:<path>, got '" + flag + "'");
  }
  const auto id = flag.substr(5, colon - 5);
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(id, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != id.size() || v > 0xFFFF) throw std::invalid_argument("bad tile id '" + id + "'");
  return {static_cast<std::uint32_t>(v), flag.substr(colon + 1)};
}

int cmd_gen(const GenOptions& o, std::ostream& err) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(o.in));
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const nlohmann::json::parse_error& e) {
    err << "error: " << o.in << ": " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const auto desc = platform::parse_description(doc);
    const auto config = platform::map_description(desc);
    write_file(o.out, platform::canonical_dump(platform::to_json(config)));
  } catch (const platform::ValidationError& e) {
    err << "error: " << o.in << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitLoad;
  }
  return kExitOk;
}

int cmd_run(const RunOptions& o, std::ostream& err) {
  std::optional<platform::SystemInstance> sys;
  try {
    const auto config = platform::parse_configuration(nlohmann::json::parse(read_file(o.config)));
    platform::ProgramSet programs;
    for (const auto& flag : o.programs) {
      const auto [tile, path] = parse_program_flag(flag);
      try {
        programs[tile] = pe::assemble(read_file(path));
      } catch (const pe::AsmError& e) {
        throw LoadError(path + ": " + e.what());
      }
    }
    sys.emplace(platform::map_configuration(config, programs, {o.seed, o.traffic_rate}));
  } catch (const std::exception& e) {
    // Anything wrong with the inputs is a load error.
    err << "error: " << e.what() << "\n";
    return kExitLoad;
  }

  if (sys->fabric() && o.cycles > kMaxDebugCycles) {
    err << "error: debug timestamps are 32 bits; with debug enabled --cycles is at most " << kMaxDebugCycles << "\n";
    return kExitUsage;
  }
  if (o.debug_listen) {
    if (!sys->fabric()) {
      err << "error: --debug-listen needs a configuration with debug enabled\n";
      return kExitLoad;
    }
    try {
      const auto [host, port] = daemon::parse_endpoint(*o.debug_listen);
      daemon::TcpListener listener(host, port);
      err << "listening on " << host << ":" << listener.port() << "\n" << std::flush;
      auto channel = listener.accept();
      const auto report = daemon::run_debug_session(*sys, *channel, o.cycles);
      if (!report.ran) err << "warning: host detached before RUN; nothing was simulated\n";
      if (report.host_detached) err << "warning: host detached during the run\n";
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const daemon::TransportError& e) {
      err << "error: " << e.what() << "\n";
      return kExitNetwork;
    }
  } else {
    sys->run(o.cycles);
  }

  if (o.stats) {
    try {
      write_file(*o.stats, platform::canonical_dump(sys->stats()));
    } catch (const LoadError& e) {
      err << "error: " << e.what() << "\n";
      return kExitLoad;
    }
  }
  return kExitOk;
}

int cmd_attach(const AttachOptions& o, std::ostream& err) {
  host::TriggerFile triggers;
  if (o.triggers) {
    try {
      triggers = host::parse_trigger_file(nlohmann::json::parse(read_file(*o.triggers)));
    } catch (const std::exception& e) {
      err << "error: " << *o.triggers << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
  if (!out) {
    err << "error: cannot write " << o.out << "\n";
    return kExitLoad;
  }

  std::unique_ptr<host::Session> session;
  try {
    const auto [h, port] = daemon::parse_endpoint(o.connect);
    session = host::Session::connect_tcp(h, port, {});
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const daemon::TransportError& e) {
    err << "error: " << o.connect << ": " << e.what() << "\n";
    return kExitNetwork;
  }

  try {
    const auto modules = session->enumerate();
    try {
      for (const auto& t : triggers.triggers) session->set_trigger(t);
    } catch (const std::invalid_argument& e) {
      err << "error: " << *o.triggers << ": " << e.what() << "\n";
      return kExitUsage;
    }
    session->start_collection(host::start_set(triggers, modules));
    session->run();

    std::vector<debug::ModuleId> ids;
    for (const auto& m : modules) ids.push_back(m.id);
    host::StreamMerger merger(ids);
    const auto emit = [&](const std::vector<debug::TraceEvent>& events) {
      for (const auto& e : events) out << host::jsonl_line(host::decode_event(e));
    };
    const std::chrono::milliseconds quiet(o.event_timeout_ms);
    while (auto item = session->next_item(quiet)) {
      if (item->event) {
        merger.push(*item->event);
      } else {
        merger.watermark(item->mark);
      }
      emit(merger.take_ready());
    }
    emit(merger.finish());
  } catch (const host::Timeout& e) {
    err << "error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const host::NackTimeout& e) {
    err << "error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const host::MalformedFrame& e) {
    err << "error: malformed frame at byte " << e.offset() << ": " << e.reason() << "\n";
    return kExitNetwork;
  } catch (const daemon::TransportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNetwork;
  }
  if (!out.flush()) {
    err << "error: cannot write " << o.out << "\n";
    return kExitLoad;
  }
  return kExitOk;
}

}  // namespace tilesim::cli
