#ifndef ENGINE_SERVE_HPP
#define ENGINE_SERVE_HPP

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "engine/runtime.hpp"

// Long-running mode: line-protocol listeners feed the bounded queue and the
// model, a single processing thread closes per-tick batches as the event
// watermark advances, and shutdown drains everything that was accepted.
//
// Ports: events on listen_port, weather on listen_port + 1. Each accepted
// line is answered with "ok", "err malformed", or "err backpressure".

namespace engine {

namespace net {

// Accepts connections on one port and feeds complete lines to a callback
// that returns the response line.
class line_listener {
 public:
  using line_callback = std::function<std::string(const std::string&)>;

  line_listener(int port, line_callback on_line)
      : on_line_(std::move(on_line)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw config_error("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      ::close(listen_fd_);
      throw config_error("cannot bind port " + std::to_string(port));
    }
    if (::listen(listen_fd_, 16) < 0) {
      ::close(listen_fd_);
      throw config_error("listen() failed on port " + std::to_string(port));
    }
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  ~line_listener() { stop(); }

  line_listener(const line_listener&) = delete;
  line_listener& operator=(const line_listener&) = delete;

  void stop() {
    bool expected = false;
    if (!stopping_.compare_exchange_strong(expected, true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    // No new clients can appear now; unblock and join the existing ones.
    {
      std::lock_guard lock(clients_mutex_);
      for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (std::thread& t : client_threads_) {
      if (t.joinable()) t.join();
    }
  }

 private:
  void accept_loop() {
    while (true) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) return;  // listener closed
      {
        std::lock_guard lock(clients_mutex_);
        client_fds_.push_back(fd);
        client_threads_.emplace_back([this, fd] { client_loop(fd); });
      }
    }
  }

  void client_loop(int fd) {
    std::string buffer;
    char chunk[4096];
    while (true) {
      ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string response = on_line_(line) + "\n";
        ::send(fd, response.data(), response.size(), MSG_NOSIGNAL);
      }
    }
    ::close(fd);
  }

  line_callback on_line_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex clients_mutex_;
  std::vector<int> client_fds_;
  std::vector<std::thread> client_threads_;
};

}  // namespace net

class serve_loop {
 public:
  serve_loop(engine_config cfg, std::ostream& log)
      : cfg_(std::move(cfg)), log_(log), state_(load_full_state(cfg_)) {
    if (!cfg_.listen_port) throw config_error("serve needs listen_port in the config");
    queue_ = std::make_unique<event_queue>(cfg_.queue_capacity);
    weather_terms_.reserve(64);
  }

  // Runs until the stop flag is set; drains and flushes before returning.
  int run(const std::atomic<bool>& stop) {
    xml_emitter emitter(cfg_.out_dir, state_.registry->default_device());

    net::line_listener events(*cfg_.listen_port,
                              [this](const std::string& line) { return on_event_line(line); });
    net::line_listener weather(*cfg_.listen_port + 1,
                               [this](const std::string& line) { return on_weather_line(line); });
    log_ << "listening: events on port " << *cfg_.listen_port << ", weather on port "
         << (*cfg_.listen_port + 1) << "\n";

    while (!stop.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      process_weather(emitter);
      drain_queue();
      // Close every tick the watermark has safely passed.
      while (!buckets_.empty() &&
             watermark_ - buckets_.begin()->first > cfg_.coalesce_window_ticks) {
        close_tick(buckets_.begin()->first, emitter);
      }
    }

    // Drain barrier: everything accepted must reach the output files.
    events.stop();
    weather.stop();
    process_weather(emitter);
    drain_queue();
    while (!buckets_.empty()) close_tick(buckets_.begin()->first, emitter);
    emitter.flush();
    log_ << "shutdown: events=" << accepted_events_ << " commands=" << emitter.commands_written()
         << "\n";
    return 0;
  }

 private:
  std::string on_event_line(const std::string& line) {
    event_record rec;
    try {
      std::lock_guard lock(intake_mutex_);
      rec = intake_.parse_line(line);
    } catch (const malformed_event&) {
      return "err malformed";
    }
    try {
      queue_->enqueue(std::move(rec));
    } catch (const queue_full&) {
      return "err backpressure";
    }
    accepted_events_.fetch_add(1);
    return "ok";
  }

  std::string on_weather_line(const std::string& line) {
    weather_cell cell;
    try {
      cell = detail::parse_weather_line(line);
    } catch (const std::exception&) {
      return "err malformed";
    }
    std::lock_guard lock(weather_mutex_);
    pending_cells_.push_back(std::move(cell));
    return "ok";
  }

  void process_weather(xml_emitter& emitter) {
    std::vector<weather_cell> cells;
    {
      std::lock_guard lock(weather_mutex_);
      cells.swap(pending_cells_);
    }
    if (cells.empty()) return;
    std::vector<invariant> terms = cells_to_invariants(cells, cfg_.horizon_ticks);
    weather_terms_.insert(weather_terms_.end(), terms.begin(), terms.end());
    std::set<tick> ticks;
    for (const weather_cell& c : cells) ticks.insert(c.at);
    for (tick t : ticks) {
      std::vector<device_binding> bindings;
      spatial_snapshot snap = snapshot_at(state_, weather_terms_, t);
      for (const coverage_rule& rule : state_.rules) {
        if (auto fired = evaluate_rule(rule, snap)) {
          for (const visualization_command& cmd : fired->commands) {
            bindings.push_back(device_binding{cmd, std::nullopt, {}});
          }
        }
      }
      emitter.emit_batch(bindings);
    }
  }

  void drain_queue() {
    for (event_record& e : queue_->dequeue_batch(queue_->capacity())) {
      watermark_ = std::max(watermark_, e.timestamp);
      buckets_[e.timestamp].push_back(std::move(e));
    }
  }

  // Emits every group anchored at tick t, absorbing same-key events from the
  // following window ticks, then removes the consumed events.
  void close_tick(tick t, xml_emitter& emitter) {
    std::vector<event_record> span;
    std::vector<tick> span_ticks;
    for (auto it = buckets_.begin(); it != buckets_.end() && it->first <= t + cfg_.coalesce_window_ticks;
         ++it) {
      std::sort(it->second.begin(), it->second.end(),
                [](const event_record& a, const event_record& b) { return a.id < b.id; });
      span.insert(span.end(), it->second.begin(), it->second.end());
      span_ticks.push_back(it->first);
    }

    std::vector<bool> consumed(span.size(), false);
    std::vector<coalesced_event> groups;
    for (std::size_t i = 0; i < span.size(); ++i) {
      if (consumed[i] || span[i].timestamp != t) continue;
      coalesced_event g;
      g.representative = span[i];
      g.count = 1;
      g.first_tick = span[i].timestamp;
      g.last_tick = span[i].timestamp;
      consumed[i] = true;
      for (std::size_t j = i + 1; j < span.size(); ++j) {
        if (consumed[j]) continue;
        if (span[j].source != span[i].source || span[j].category != span[i].category) continue;
        g.count += 1;
        g.last_tick = std::max(g.last_tick, span[j].timestamp);
        if (span[j].severity > g.representative.severity) g.representative = span[j];
        consumed[j] = true;
      }
      groups.push_back(std::move(g));
    }

    // Put unconsumed later-tick events back.
    std::map<tick, std::vector<event_record>> rest;
    for (std::size_t i = 0; i < span.size(); ++i) {
      if (!consumed[i]) rest[span[i].timestamp].push_back(std::move(span[i]));
    }
    for (tick st : span_ticks) buckets_.erase(st);
    for (auto& [st, events] : rest) buckets_[st] = std::move(events);

    if (groups.empty()) return;
    auto assignments = std::make_shared<batch_assignments>(assign_batch(groups, state_.profiles));
    handler_registry handlers = make_default_handlers(assignments);
    std::vector<device_binding> bindings;
    for (const coalesced_event& g : groups) {
      std::vector<device_binding> bound =
          process_group(g, handlers, *assignments, *state_.registry);
      bindings.insert(bindings.end(), bound.begin(), bound.end());
    }
    emitter.emit_batch(bindings);
  }

  engine_config cfg_;
  std::ostream& log_;
  engine_state state_;
  std::unique_ptr<event_queue> queue_;

  std::mutex intake_mutex_;
  event_intake intake_;
  std::atomic<std::size_t> accepted_events_{0};

  std::mutex weather_mutex_;
  std::vector<weather_cell> pending_cells_;
  std::vector<invariant> weather_terms_;

  std::map<tick, std::vector<event_record>> buckets_;
  tick watermark_ = std::numeric_limits<tick>::min();
};

}  // namespace engine

#endif  // ENGINE_SERVE_HPP
