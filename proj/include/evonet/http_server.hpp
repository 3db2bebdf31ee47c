#pragma once

#include <poll.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <list>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <variant>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "evonet/control_plane.hpp"
#include "evonet/error.hpp"

namespace evonet {

// HTTP + WebSocket front end for a ControlPlane, one thread per connection.
// Blocking reads are guarded by poll() so stop() returns promptly.
class HttpServer {
 public:
  struct Options {
    std::string address = "127.0.0.1";
    unsigned short port = 0;  // 0 picks a free port
    std::filesystem::path static_dir;  // optional: served for non-/api GETs
  };

  HttpServer(ControlPlane& plane, Options options) : plane_(plane), options_(std::move(options)) {}

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  ~HttpServer() { stop(); }

  // Binds and starts accepting; returns the bound port.
  unsigned short start() {
    namespace net = boost::asio;
    const auto endpoint = net::ip::tcp::endpoint(net::ip::make_address(options_.address), options_.port);
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    accept_thread_ = std::jthread([this] { accept_loop(); });
    return port_;
  }

  unsigned short port() const noexcept { return port_; }

  void stop() {
    if (stopping_.exchange(true)) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::list<Session> sessions;
    {
      std::lock_guard lock(sessions_mutex_);
      sessions.swap(sessions_);
    }
    sessions.clear();  // joins
    boost::system::error_code ec;
    acceptor_.close(ec);
  }

 private:
  using tcp = boost::asio::ip::tcp;
  static constexpr int kPollMillis = 50;

  struct Session {
    std::shared_ptr<std::atomic<bool>> done;
    std::jthread thread;
  };

  // True when `fd` has data to read; false on timeout or stop.
  bool wait_readable(int fd) const {
    while (!stopping_) {
      pollfd p{fd, POLLIN, 0};
      const int r = ::poll(&p, 1, kPollMillis);
      if (r > 0) return true;
      if (r < 0 && errno != EINTR) return false;
    }
    return false;
  }

  void accept_loop() {
    while (wait_readable(acceptor_.native_handle())) {
      boost::system::error_code ec;
      tcp::socket socket(io_);
      acceptor_.accept(socket, ec);
      if (ec) continue;
      std::lock_guard lock(sessions_mutex_);
      sessions_.remove_if([](const Session& s) { return s.done->load(); });
      auto done = std::make_shared<std::atomic<bool>>(false);
      sessions_.push_back({done, std::jthread([this, done, s = std::move(socket)]() mutable {
                             session(std::move(s));
                             done->store(true);
                           })});
    }
  }

  void session(tcp::socket socket) {
    namespace beast = boost::beast;
    namespace http = beast::http;
    beast::flat_buffer buffer;
    boost::system::error_code ec;
    for (;;) {
      if (buffer.size() == 0 && !wait_readable(socket.native_handle())) return;
      http::request<http::string_body> req;
      http::read(socket, buffer, req, ec);
      if (ec) return;

      if (beast::websocket::is_upgrade(req)) {
        stream(std::move(socket), std::move(req));
        return;
      }
      auto res = respond(req);
      const bool keep_alive = res.keep_alive();
      http::write(socket, res, ec);
      if (ec || !keep_alive) break;
    }
    socket.shutdown(tcp::socket::shutdown_send, ec);
  }

  boost::beast::http::response<boost::beast::http::string_body> respond(
      const boost::beast::http::request<boost::beast::http::string_body>& req) {
    namespace http = boost::beast::http;
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(req.keep_alive());
    const std::string target(req.target());

    if (!target.starts_with("/api/") && !options_.static_dir.empty() && req.method() == http::verb::get) {
      serve_static(target, res);
    } else {
      const auto out = plane_.handle(std::string(req.method_string()), target, req.body());
      res.result(static_cast<http::status>(out.status));
      res.set(http::field::content_type, "application/json");
      res.body() = out.body;
    }
    res.set(http::field::access_control_allow_origin, "*");
    res.prepare_payload();
    return res;
  }

  void serve_static(std::string target, boost::beast::http::response<boost::beast::http::string_body>& res) {
    namespace http = boost::beast::http;
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target == "/") target = "/index.html";
    if (target.find("..") != std::string::npos) {
      res.result(http::status::bad_request);
      return;
    }
    const auto path = options_.static_dir / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      res.result(http::status::not_found);
      res.body() = "not found";
      return;
    }
    std::ostringstream body;
    body << in.rdbuf();
    res.result(http::status::ok);
    const auto ext = path.extension().string();
    const char* type = ext == ".html" ? "text/html" : ext == ".js" ? "text/javascript" : ext == ".css" ? "text/css" : "application/octet-stream";
    res.set(http::field::content_type, type);
    res.body() = body.str();
  }

  void stream(tcp::socket socket, boost::beast::http::request<boost::beast::http::string_body> req) {
    namespace beast = boost::beast;
    namespace http = beast::http;
    namespace websocket = beast::websocket;
    boost::system::error_code ec;

    auto opened = plane_.open_stream(std::string(req.target()));
    if (auto* err = std::get_if<ApiResponse>(&opened)) {
      http::response<http::string_body> res{static_cast<http::status>(err->status), req.version()};
      res.set(http::field::content_type, "application/json");
      res.body() = err->body;
      res.prepare_payload();
      http::write(socket, res, ec);
      return;
    }
    auto sub = std::get<std::shared_ptr<Subscription>>(opened);

    websocket::stream<tcp::socket> ws(std::move(socket));
    ws.accept(req, ec);
    if (ec) {
      sub->close();
      return;
    }
    ws.text(true);
    const int fd = ws.next_layer().native_handle();
    beast::flat_buffer inbound;
    while (!stopping_) {
      if (auto frame = sub->pop(std::chrono::milliseconds(kPollMillis))) {
        ws.write(boost::asio::buffer(*frame), ec);
        if (ec) break;
        continue;
      }
      if (sub->drained()) {
        ws.close(websocket::close_code::normal, ec);
        break;
      }
      // Client traffic is ignored, but reading it processes close frames.
      pollfd p{fd, POLLIN, 0};
      if (::poll(&p, 1, 0) > 0) {
        ws.read(inbound, ec);
        if (ec) break;
        inbound.consume(inbound.size());
      }
    }
    sub->close();
  }

  ControlPlane& plane_;
  Options options_;
  boost::asio::io_context io_;
  tcp::acceptor acceptor_{io_};
  unsigned short port_ = 0;
  std::atomic<bool> stopping_{false};
  std::jthread accept_thread_;
  std::mutex sessions_mutex_;
  std::list<Session> sessions_;
};

}  // namespace evonet
