#ifndef ENGINE_PIPELINE_HPP
#define ENGINE_PIPELINE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "engine/errors.hpp"
#include "engine/notification.hpp"
#include "engine/text.hpp"

// Event intake, deterministic ordering, flood coalescing, and dispatch to
// per-category handlers.

namespace engine {

struct event_record {
  std::string id;      // assigned at intake, unique within a run
  std::string source;  // device or sensor id
  std::int64_t timestamp = 0;
  std::string category;  // "alarm", "help-request", ...
  int severity = 1;      // 0 (info) .. 3 (critical)
  std::vector<std::pair<std::string, std::string>> payload;  // order preserved

  bool operator==(const event_record&) const = default;
};

// A burst of like events merged into one representative.
struct coalesced_event {
  event_record representative;  // carries the group's maximum severity
  std::size_t count = 1;
  std::int64_t first_tick = 0;
  std::int64_t last_tick = 0;
};

// ── intake ──────────────────────────────────────────────────────────────────
// Wire format: evt src=<id> t=<int> cat=<word> [sev=<0-3>] [key="value"]...
// The intake assigns ids as <source>-<per-source sequence>.

class event_intake {
 public:
  event_record parse_line(std::string_view line) {
    std::vector<text::token> tokens;
    try {
      tokens = text::split_line(line);
    } catch (const std::exception& e) {
      throw malformed_event(e.what());
    }
    if (tokens.empty() || !tokens[0].key.empty() || tokens[0].value != "evt") {
      throw malformed_event("not an event line");
    }
    event_record rec;
    bool have_src = false, have_t = false, have_cat = false, have_sev = false;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const text::token& tok = tokens[i];
      if (tok.key.empty()) throw malformed_event("bare token \"" + tok.value + "\"");
      if (tok.key == "src") {
        rec.source = tok.value;
        have_src = true;
      } else if (tok.key == "t") {
        auto v = text::to_int64(tok.value);
        if (!v) throw malformed_event("invalid t");
        rec.timestamp = *v;
        have_t = true;
      } else if (tok.key == "cat") {
        rec.category = tok.value;
        have_cat = true;
      } else if (tok.key == "sev") {
        auto v = text::to_int64(tok.value);
        if (!v || *v < 0 || *v > 3) throw malformed_event("invalid sev");
        rec.severity = static_cast<int>(*v);
        have_sev = true;
      } else {
        rec.payload.emplace_back(tok.key, tok.value);
      }
    }
    if (!have_src || rec.source.empty()) throw malformed_event("missing src");
    if (!have_t) throw malformed_event("missing t");
    if (!have_cat || rec.category.empty()) throw malformed_event("missing cat");
    if (!have_sev) rec.severity = 1;
    rec.id = rec.source + "-" + std::to_string(++sequence_[rec.source]);
    return rec;
  }

 private:
  std::map<std::string, std::uint64_t> sequence_;
};

// ── ordering and queueing ───────────────────────────────────────────────────

// Total dequeue order: severity descending, then timestamp ascending, then
// id ascending. Critical items surface first under floods.
struct event_priority_less {
  bool operator()(const event_record& a, const event_record& b) const {
    if (a.severity != b.severity) return a.severity > b.severity;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
  }
};

inline constexpr std::size_t default_queue_capacity = 10'000;

// Bounded priority queue. Multiple producers may enqueue concurrently;
// a single consumer drains batches.
class event_queue {
 public:
  explicit event_queue(std::size_t capacity = default_queue_capacity)
      : capacity_(capacity) {}

  void enqueue(event_record e) {
    std::lock_guard lock(mutex_);
    if (events_.size() >= capacity_) throw queue_full(capacity_);
    events_.insert(std::move(e));
  }

  std::vector<event_record> dequeue_batch(std::size_t n) {
    std::lock_guard lock(mutex_);
    std::vector<event_record> out;
    out.reserve(std::min(n, events_.size()));
    while (out.size() < n && !events_.empty()) {
      out.push_back(*events_.begin());
      events_.erase(events_.begin());
    }
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
  }

  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  // multiset: records violating the unique-id invariant still flow through
  // rather than vanishing on insert
  std::multiset<event_record, event_priority_less> events_;
};

// ── coalescing ──────────────────────────────────────────────────────────────
// Events sharing (source, category) merge while their timestamps stay within
// window_ticks of the group's first event. Input must be sorted by timestamp
// ascending. The representative is the earliest event carrying the group's
// maximum severity.

inline constexpr std::int64_t default_coalesce_window_ticks = 5;

inline std::vector<coalesced_event> coalesce(const std::vector<event_record>& window,
                                             std::int64_t window_ticks) {
  std::vector<coalesced_event> groups;
  // group index per (source, category) for the currently open group
  std::map<std::pair<std::string, std::string>, std::size_t> open;
  for (const event_record& e : window) {
    auto key = std::make_pair(e.source, e.category);
    auto it = open.find(key);
    if (it != open.end()) {
      coalesced_event& g = groups[it->second];
      if (e.timestamp - g.first_tick <= window_ticks) {
        g.count += 1;
        g.last_tick = std::max(g.last_tick, e.timestamp);
        if (e.severity > g.representative.severity) g.representative = e;
        continue;
      }
    }
    coalesced_event g;
    g.representative = e;
    g.count = 1;
    g.first_tick = e.timestamp;
    g.last_tick = e.timestamp;
    open[key] = groups.size();
    groups.push_back(std::move(g));
  }
  return groups;
}

// ── dispatch ────────────────────────────────────────────────────────────────

using event_handler = std::function<std::vector<visualization_command>(const coalesced_event&)>;

// Category -> handler table. Construction requires the "unknown" fallback.
class handler_registry {
 public:
  explicit handler_registry(std::map<std::string, event_handler> handlers)
      : handlers_(std::move(handlers)) {
    if (handlers_.find(std::string(fallback_category)) == handlers_.end()) {
      throw config_error("handler registry needs an \"unknown\" fallback handler");
    }
  }

  static constexpr std::string_view fallback_category = "unknown";

  const event_handler& handler_for(const std::string& category) const {
    auto it = handlers_.find(category);
    if (it == handlers_.end()) it = handlers_.find(std::string(fallback_category));
    return it->second;
  }

 private:
  std::map<std::string, event_handler> handlers_;
};

// Runs the category's handler. A throwing handler becomes an operator-visible
// error banner instead of silence.
inline std::vector<visualization_command> dispatch(const coalesced_event& e,
                                                   const handler_registry& registry) {
  try {
    return registry.handler_for(e.representative.category)(e);
  } catch (const std::exception&) {
    return {event_banner{"handler-error", e.representative.id}};
  }
}

}  // namespace engine

#endif  // ENGINE_PIPELINE_HPP
