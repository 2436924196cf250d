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

#include <signal.h>

#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "serve.hpp"
#include "tilesim/daemon/channel.hpp"

namespace {

int run_serve(const std::string& connect, std::uint16_t http_port) {
  using namespace tilesim;
  cli::ServeOptions opts;
  try {
    std::tie(opts.sim_host, opts.sim_port) = daemon::parse_endpoint(connect);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  opts.http_port = http_port;

  // SIGINT and SIGTERM are taken by a waiter thread instead of a handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  std::unique_ptr<cli::HttpServer> server;
  try {
    server = std::make_unique<cli::HttpServer>(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitNetwork;
  }
  std::cerr << "serving on http://" << opts.http_host << ":" << server->port() << "\n" << std::flush;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server->stop();
  });
  server->serve();
  waiter.join();
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tilesim::cli;
  CLI::App app{"tilesim: tiled manycore simulator with trace-based debugging"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Map a platform description to an explicit configuration");
  gen_cmd->add_option("--in", gen.in, "Platform description (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Configuration to write (JSON)")->required();

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a configuration");
  run_cmd->add_option("--config", run.config, "Platform configuration (JSON)")->required();
  run_cmd->add_option("--program", run.programs, "Assembly program, tile=<id>:<path>; repeatable");
  run_cmd->add_option("--cycles", run.cycles, "Cycle budget")->required();
  run_cmd->add_option("--stats", run.stats, "Write statistics JSON here");
  run_cmd->add_option("--debug-listen", run.debug_listen, "Wait for a debug host on host:port before cycle 0");
  run_cmd->add_option("--seed", run.seed, "Seed for synthetic traffic")->capture_default_str();
  run_cmd->add_option("--traffic-rate", run.traffic_rate, "Synthetic packets per tile per cycle")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  AttachOptions attach;
  auto* attach_cmd = app.add_subcommand("attach", "Attach to a simulator and record a merged trace");
  attach_cmd->add_option("--connect", attach.connect, "Simulator host:port")->required();
  attach_cmd->add_option("--triggers", attach.triggers, "Trigger file (JSON)");
  attach_cmd->add_option("--out", attach.out, "Trace to write (JSON lines)")->required();
  attach_cmd->add_option("--event-timeout-ms", attach.event_timeout_ms, "Give up after this long without data")
      ->capture_default_str();

  std::string serve_connect;
  std::uint16_t serve_http = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP and WebSocket API over a debug session");
  serve_cmd->add_option("--connect", serve_connect, "Simulator host:port")->required();
  serve_cmd->add_option("--http", serve_http, "HTTP port (0 picks one)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, std::cerr);
    if (*run_cmd) return cmd_run(run, std::cerr);
    if (*attach_cmd) return cmd_attach(attach, std::cerr);
    if (*serve_cmd) return run_serve(serve_connect, serve_http);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
