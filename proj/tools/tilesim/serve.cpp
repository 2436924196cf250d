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

#include "serve.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <atomic>
#include <functional>
#include <utility>
#include <set>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "tilesim/host/decode.hpp"
#include "tilesim/host/merge.hpp"
#include "tilesim/host/trigger_json.hpp"

namespace tilesim::cli {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

HttpReply error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

HttpReply no_session() { return error(409, "no simulator session"); }
HttpReply too_late() { return error(409, "the run has started; configure before POST /api/run"); }

}  // namespace

DebugService::~DebugService() { stop(); }

void DebugService::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (pump_.joinable()) pump_.join();
}

bool DebugService::ensure_session() {
  {
    std::lock_guard lock(mu_);
    if (ended_) return false;
    if (session_) return true;
  }
  try {
    auto s = host::Session::connect_tcp(options_.sim_host, options_.sim_port, {}, std::chrono::seconds(1));
    auto mods = s->enumerate();
    std::lock_guard lock(mu_);
    session_ = std::move(s);
    modules_ = std::move(mods);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool DebugService::is_running() {
  std::lock_guard lock(mu_);
  return running_;
}

HttpReply DebugService::handle(const std::string& method, const std::string& target, const std::string& body) {
  const auto path = target.substr(0, target.find('?'));
  std::lock_guard control(control_mu_);
  if (path == "/api/status" && method == "GET") return status();
  if (path == "/api/modules" && method == "GET") return modules();
  if (path == "/api/triggers" && method == "POST") return triggers(body);
  if (path == "/api/collection" && method == "POST") return collection(body);
  if (path == "/api/run" && method == "POST") return run();
  if (path == "/api/status" || path == "/api/modules" || path == "/api/triggers" || path == "/api/collection" ||
      path == "/api/run") {
    return error(405, "method not allowed");
  }
  return error(404, "no such endpoint");
}

HttpReply DebugService::status() {
  std::lock_guard lock(mu_);
  json j{{"connected", session_ != nullptr && !ended_},
         {"running", running_},
         {"ended", ended_},
         {"events", history_.size()}};
  if (!stream_error_.empty()) j["error"] = stream_error_;
  return {200, j};
}

HttpReply DebugService::modules() {
  // The table stays readable after the run ended.
  if (!ensure_session() && modules_.empty()) return no_session();
  json list = json::array();
  std::lock_guard lock(mu_);
  for (const auto& m : modules_) {
    list.push_back({{"id", m.id}, {"type", debug::to_string(m.type)}, {"version", m.version}, {"attach", m.attach}});
  }
  return {200, list};
}

HttpReply DebugService::triggers(const std::string& body) {
  debug::TriggerSpec spec;
  try {
    spec = host::parse_trigger(json::parse(body));
  } catch (const json::exception& e) {
    return error(400, e.what());
  } catch (const host::TriggerFormatError& e) {
    return error(400, e.what());
  }
  if (!ensure_session()) return no_session();
  if (is_running()) return too_late();
  try {
    session_->set_trigger(spec);
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const host::NackTimeout& e) {
    return error(504, e.what());
  }
  return {200, json{{"status", "armed"}, {"trigger", host::to_json(spec)}}};
}

HttpReply DebugService::collection(const std::string& body) {
  std::string action;
  std::vector<debug::ModuleId> ids;
  bool all = false;
  try {
    const auto j = json::parse(body);
    if (!j.is_object()) return error(400, "expected an object");
    action = j.at("action").get<std::string>();
    if (action != "start" && action != "stop") return error(400, "action must be \"start\" or \"stop\"");
    const auto& m = j.contains("modules") ? j.at("modules") : json("all");
    if (m.is_string() && m.get<std::string>() == "all") {
      all = true;
    } else if (m.is_array()) {
      for (const auto& id : m) {
        const auto v = id.get<std::int64_t>();
        if (v < 0 || v > 0xFE) return error(400, "module id out of range");
        ids.push_back(static_cast<debug::ModuleId>(v));
      }
    } else {
      return error(400, "modules must be \"all\" or a list of ids");
    }
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
  if (!ensure_session()) return no_session();
  if (is_running()) return too_late();
  if (all) {
    for (const auto& m : modules_) {
      if (m.type != debug::ModuleType::ExtIf) ids.push_back(m.id);
    }
  }
  try {
    if (action == "start") {
      session_->start_collection(ids);
    } else {
      session_->stop_collection(ids);
    }
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const host::NackTimeout& e) {
    return error(504, e.what());
  }
  return {200, json{{"status", action == "start" ? "started" : "stopped"}, {"modules", ids}}};
}

HttpReply DebugService::run() {
  if (!ensure_session()) return no_session();
  {
    std::lock_guard lock(mu_);
    if (running_) return error(409, "already running");
    running_ = true;
  }
  session_->run();
  pump_ = std::thread([this] { pump(); });
  return {200, json{{"status", "running"}}};
}

void DebugService::pump() {
  std::vector<debug::ModuleId> ids;
  for (const auto& m : modules_) ids.push_back(m.id);
  host::StreamMerger merger(ids);
  const auto publish = [&](const std::vector<debug::TraceEvent>& events) {
    if (events.empty()) return;
    {
      std::lock_guard lock(mu_);
      for (const auto& e : events) history_.push_back(host::to_json(host::decode_event(e)).dump());
    }
    cv_.notify_all();
  };
  std::string failure;
  try {
    for (;;) {
      {
        std::lock_guard lock(mu_);
        if (stopping_) return;
      }
      std::optional<host::StreamItem> item;
      try {
        item = session_->next_item(std::chrono::milliseconds(200));
      } catch (const host::Timeout&) {
        continue;
      }
      if (!item) break;
      if (item->event) {
        merger.push(*item->event);
      } else {
        merger.watermark(item->mark);
      }
      publish(merger.take_ready());
    }
    publish(merger.finish());
  } catch (const std::exception& e) {
    failure = e.what();
  }
  {
    std::lock_guard lock(mu_);
    ended_ = true;
    stream_error_ = failure;
  }
  cv_.notify_all();
}

bool DebugService::wait_event(std::size_t index, std::string& out) {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return history_.size() > index || ended_ || stopping_; });
  if (history_.size() > index && !stopping_) {
    out = history_[index];
    return true;
  }
  return false;
}

// Transport

struct HttpServer::Impl {
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::atomic<bool> stopping{false};
  std::mutex mu;
  std::set<int> open_fds;
  std::vector<std::thread> workers;

  void track(int fd, bool open) {
    std::lock_guard lock(mu);
    if (open) {
      open_fds.insert(fd);
    } else {
      open_fds.erase(fd);
    }
  }
};

HttpServer::HttpServer(ServeOptions options) : impl_(std::make_unique<Impl>()), service_(options) {
  const tcp::endpoint ep(asio::ip::make_address(options.http_host), options.http_port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  boost::system::error_code ec;
  impl_->acceptor.bind(ep, ec);
  if (ec) throw std::runtime_error("cannot listen on port " + std::to_string(options.http_port) + ": " + ec.message());
  impl_->acceptor.listen();
}

HttpServer::~HttpServer() {
  stop();
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
}

std::uint16_t HttpServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void HttpServer::stop() {
  impl_->stopping = true;
  service_.stop();
  std::lock_guard lock(impl_->mu);
  for (const int fd : impl_->open_fds) ::shutdown(fd, SHUT_RDWR);
}

namespace {

// Runs `fn` once, at the latest when the last guard goes out of scope.
class Untrack {
 public:
  explicit Untrack(std::function<void()>& fn) : fn_(fn) {}
  ~Untrack() {
    if (fn_) std::exchange(fn_, nullptr)();
  }

 private:
  std::function<void()>& fn_;
};

// `untrack` must run before the socket closes, or a new connection could
// reuse the descriptor while it is still registered.
void serve_connection(tcp::socket sock, DebugService& service, std::function<void()> untrack) {
  const Untrack guard(untrack);
  beast::flat_buffer buf;
  boost::system::error_code ec;
  for (;;) {
    http::request<http::string_body> req;
    http::read(sock, buf, req, ec);
    if (ec) return;

    if (websocket::is_upgrade(req)) {
      if (req.target() != "/ws/events") {
        http::response<http::string_body> res{http::status::not_found, req.version()};
        res.set(http::field::content_type, "application/json");
        res.body() = R"({"error":"no such endpoint"})";
        res.prepare_payload();
        http::write(sock, res, ec);
        return;
      }
      websocket::stream<tcp::socket> ws(std::move(sock));
      const Untrack ws_guard(untrack);
      ws.accept(req, ec);
      if (ec) return;
      ws.text(true);
      std::string msg;
      for (std::size_t i = 0; service.wait_event(i, msg); ++i) {
        ws.write(asio::buffer(msg), ec);
        if (ec) return;
      }
      ws.close(websocket::close_code::normal, ec);
      return;
    }

    http::response<http::string_body> res;
    res.version(req.version());
    res.set(http::field::access_control_allow_origin, "*");
    if (req.method() == http::verb::options) {
      res.result(http::status::no_content);
      res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
      res.set(http::field::access_control_allow_headers, "Content-Type");
    } else {
      const auto reply = service.handle(std::string(req.method_string()), std::string(req.target()), req.body());
      res.result(static_cast<http::status>(reply.status));
      res.set(http::field::content_type, "application/json");
      res.body() = reply.body.dump();
    }
    res.keep_alive(req.keep_alive());
    res.prepare_payload();
    http::write(sock, res, ec);
    if (ec || !req.keep_alive()) return;
  }
}

}  // namespace

void HttpServer::serve() {
  const int lfd = impl_->acceptor.native_handle();
  while (!impl_->stopping) {
    pollfd p{lfd, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    boost::system::error_code ec;
    tcp::socket sock(impl_->ioc);
    impl_->acceptor.accept(sock, ec);
    if (ec) continue;
    const int fd = sock.native_handle();
    impl_->track(fd, true);
    std::lock_guard lock(impl_->mu);
    impl_->workers.emplace_back([this, fd, s = std::move(sock)]() mutable {
      serve_connection(std::move(s), service_, [this, fd] { impl_->track(fd, false); });
    });
  }
}

}  // namespace tilesim::cli
