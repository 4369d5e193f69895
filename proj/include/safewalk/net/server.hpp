// Session host over the network. Each connection owns one protocol endpoint;
// socket handlers only append raw messages to the connection inbox, and the
// fixed-rate tick drains it, advances the session and queues the frame.
// All handlers of a connection run on its strand.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "safewalk/session.hpp"

namespace safewalk::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
using tcp = asio::ip::tcp;

enum class Transport { Tcp, WebSocket };

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  Transport transport = Transport::Tcp;
};

namespace detail {

using Strand = asio::strand<asio::io_context::executor_type>;

/// Newline-delimited JSON over a raw TCP socket.
class TcpChannel {
 public:
  TcpChannel(tcp::socket socket) : socket_(std::move(socket)) {}

  template <typename Handler>
  void async_open(Handler&& h) {
    h(beast::error_code{});
  }

  template <typename Handler>
  void async_read(Handler&& h) {
    asio::async_read_until(socket_, buffer_, '\n',
                           [this, h = std::forward<Handler>(h)](beast::error_code ec, std::size_t n) mutable {
                             std::string line;
                             if (!ec) {
                               line.assign(asio::buffers_begin(buffer_.data()),
                                           asio::buffers_begin(buffer_.data()) + static_cast<std::ptrdiff_t>(n));
                               buffer_.consume(n);
                               while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
                             }
                             h(ec, std::move(line));
                           });
  }

  template <typename Handler>
  void async_write(const std::string& msg, Handler&& h) {
    pending_ = msg + '\n';
    asio::async_write(socket_, asio::buffer(pending_),
                      [h = std::forward<Handler>(h)](beast::error_code ec, std::size_t) mutable { h(ec); });
  }

  void close() {
    beast::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

 private:
  tcp::socket socket_;
  asio::streambuf buffer_;
  std::string pending_;
};

/// One JSON message per WebSocket text frame.
class WsChannel {
 public:
  WsChannel(tcp::socket socket) : ws_(std::move(socket)) { ws_.text(true); }

  template <typename Handler>
  void async_open(Handler&& h) {
    ws_.async_accept([h = std::forward<Handler>(h)](beast::error_code ec) mutable { h(ec); });
  }

  template <typename Handler>
  void async_read(Handler&& h) {
    ws_.async_read(buffer_, [this, h = std::forward<Handler>(h)](beast::error_code ec, std::size_t) mutable {
      std::string text;
      if (!ec) {
        text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
      }
      h(ec, std::move(text));
    });
  }

  template <typename Handler>
  void async_write(const std::string& msg, Handler&& h) {
    pending_ = msg;
    ws_.async_write(asio::buffer(pending_),
                    [h = std::forward<Handler>(h)](beast::error_code ec, std::size_t) mutable { h(ec); });
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close(ec);
  }

 private:
  beast::websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::string pending_;
};

template <typename Channel>
class Connection : public std::enable_shared_from_this<Connection<Channel>> {
 public:
  Connection(tcp::socket socket, Strand strand, SessionRegistry& registry, const RoomModel& room, double tick)
      : strand_(std::move(strand)),
        channel_(std::move(socket)),
        endpoint_(registry, room),
        timer_(strand_),
        tick_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(tick))),
        tick_seconds_(tick) {}

  void start() {
    auto self = this->shared_from_this();
    asio::dispatch(strand_, [self] {
      self->channel_.async_open(asio::bind_executor(self->strand_, [self](beast::error_code ec) {
        if (ec) return self->shutdown();
        self->read_next();
        self->deadline_ = std::chrono::steady_clock::now() + self->tick_;
        self->schedule_tick();
      }));
    });
  }

  void stop() {
    auto self = this->shared_from_this();
    asio::post(strand_, [self] { self->shutdown(); });
  }

 private:
  void read_next() {
    auto self = this->shared_from_this();
    channel_.async_read(asio::bind_executor(strand_, [self](beast::error_code ec, std::string msg) {
      if (ec) return self->shutdown();
      self->inbox_.push_back(std::move(msg));
      self->read_next();
    }));
  }

  void schedule_tick() {
    if (closed_) return;
    timer_.expires_at(deadline_);
    auto self = this->shared_from_this();
    timer_.async_wait(asio::bind_executor(strand_, [self](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->on_tick();
      self->deadline_ += self->tick_;
      self->schedule_tick();
    }));
  }

  void on_tick() {
    while (!inbox_.empty()) {
      const std::string msg = std::move(inbox_.front());
      inbox_.pop_front();
      for (const auto& reply : endpoint_.handle(msg)) send(reply.dump());
    }
    try {
      if (auto frame = endpoint_.tick(tick_seconds_)) send(frame->dump());
    } catch (const std::exception& e) {
      send(nlohmann::json{{"type", "error"}, {"message", e.what()}}.dump());
    }
  }

  void send(std::string msg) {
    outbox_.push_back(std::move(msg));
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    auto self = this->shared_from_this();
    channel_.async_write(outbox_.front(), asio::bind_executor(strand_, [self](beast::error_code ec) {
      if (ec) return self->shutdown();
      self->outbox_.pop_front();
      self->write_next();
    }));
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    channel_.close();
  }

  Strand strand_;
  Channel channel_;
  ProtocolEndpoint endpoint_;
  asio::steady_timer timer_;
  std::chrono::steady_clock::duration tick_;
  double tick_seconds_;
  std::chrono::steady_clock::time_point deadline_{};
  std::deque<std::string> inbox_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closed_ = false;
};

}  // namespace detail

class Server {
 public:
  Server(ServiceConfig cfg, RoomModel default_room, ServerOptions options)
      : registry_(cfg),
        room_(std::move(default_room)),
        options_(std::move(options)),
        acceptor_(io_, tcp::endpoint(asio::ip::make_address(options_.address), options_.port)) {
    validate(room_);
  }

  ~Server() { stop(); }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

  /// Accepts connections on `threads` background threads.
  void start(std::size_t threads = 1) {
    accept_next();
    for (std::size_t i = 0; i < std::max<std::size_t>(threads, 1); ++i) {
      workers_.emplace_back([this] { io_.run(); });
    }
  }

  /// Blocks until stop() is called from another thread or a signal handler.
  void run() {
    accept_next();
    io_.run();
  }

  /// Waits for the background threads; they exit once the io_context stops.
  void join() {
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
  }

  void stop() {
    if (stopped_.exchange(true)) return;
    io_.stop();
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
    workers_.clear();
  }

  asio::io_context& io_context() { return io_; }

 private:
  void accept_next() {
    acceptor_.async_accept(asio::make_strand(io_), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto strand = asio::make_strand(io_);
      const double tick = registry_.config().sim.tick;
      if (options_.transport == Transport::Tcp) {
        std::make_shared<detail::Connection<detail::TcpChannel>>(std::move(socket), strand, registry_, room_, tick)
            ->start();
      } else {
        std::make_shared<detail::Connection<detail::WsChannel>>(std::move(socket), strand, registry_, room_, tick)
            ->start();
      }
      accept_next();
    });
  }

  SessionRegistry registry_;
  RoomModel room_;
  ServerOptions options_;
  asio::io_context io_;
  tcp::acceptor acceptor_;
  std::vector<std::thread> workers_;
  std::atomic<bool> stopped_{false};
};

}  // namespace safewalk::net
