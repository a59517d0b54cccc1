#ifndef ENGINE_RUNTIME_HPP
#define ENGINE_RUNTIME_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "engine/config.hpp"
#include "engine/decision.hpp"
#include "engine/ingestion.hpp"
#include "engine/notification.hpp"
#include "engine/pipeline.hpp"
#include "engine/reasoning.hpp"

// Wiring: loads configured artifacts, runs the check/replay flows, and owns
// the per-device XML sinks. The serve loop builds on the same pieces.

namespace engine {

// ── per-device XML sinks ────────────────────────────────────────────────────
// One file per device under out_dir, appended one <output> block per batch.
// Device-independent bindings are routed to the default device's file but
// keep their device-independent form.

class xml_emitter {
 public:
  xml_emitter(std::filesystem::path out_dir, std::string default_device)
      : out_dir_(std::move(out_dir)), default_device_(std::move(default_device)) {
    std::filesystem::create_directories(out_dir_);
  }

  void emit_batch(const std::vector<device_binding>& bindings) {
    if (bindings.empty()) return;
    std::map<std::string, std::vector<device_binding>> per_device;
    for (const device_binding& b : bindings) {
      per_device[b.device ? *b.device : default_device_].push_back(b);
    }
    for (const auto& [device, list] : per_device) {
      append_to(device, render_xml(list));
      commands_written_ += list.size();
    }
  }

  std::size_t commands_written() const { return commands_written_; }

  void flush() {
    for (auto& [device, stream] : streams_) stream.flush();
  }

 private:
  void append_to(const std::string& device, const std::string& xml) {
    auto it = streams_.find(device);
    if (it == streams_.end()) {
      std::filesystem::path path = out_dir_ / (device + ".xml");
      it = streams_.emplace(device, std::ofstream(path, std::ios::app)).first;
      if (!it->second) throw config_error("cannot open output file " + path.string());
    }
    it->second << xml;
  }

  std::filesystem::path out_dir_;
  std::string default_device_;
  std::map<std::string, std::ofstream> streams_;
  std::size_t commands_written_ = 0;
};

// ── loaded state ────────────────────────────────────────────────────────────

struct engine_state {
  engine_config config;
  loaded_model model;
  std::vector<coverage_rule> rules;
  std::vector<stakeholder_profile> profiles;
  std::optional<device_registry> registry;
};

inline engine_state load_check_state(const engine_config& cfg) {
  validate_config(cfg);
  engine_state state{cfg, {}, {}, {}, std::nullopt};
  state.model = load_model_files(cfg.model_files);
  if (cfg.rule_file.empty()) throw config_error("config needs rules=");
  state.rules = load_rules(cfg.rule_file);
  return state;
}

inline engine_state load_full_state(const engine_config& cfg) {
  engine_state state = load_check_state(cfg);
  if (cfg.profile_file.empty()) throw config_error("config needs profiles=");
  if (cfg.registry_file.empty()) throw config_error("config needs registry=");
  state.profiles = load_profiles(cfg.profile_file);
  state.registry = load_registry(cfg.registry_file);
  return state;
}

// Reraises extraction errors with the model file location attached.
inline spatial_snapshot snapshot_at(const engine_state& state,
                                    const std::vector<invariant>& extra_terms, tick t) {
  std::vector<invariant> terms = state.model.terms;
  terms.insert(terms.end(), extra_terms.begin(), extra_terms.end());
  try {
    return extract_snapshot(terms, t);
  } catch (const unsupported_form& e) {
    if (e.term_index() < state.model.origins.size()) {
      throw config_error(state.model.origins[e.term_index()] + ": " + e.what());
    }
    throw;
  }
}

// ── check ───────────────────────────────────────────────────────────────────

struct check_result {
  bool triggered = false;
  std::string xml;  // one <output> block with every fired reaction's commands
};

inline check_result run_check(const engine_config& cfg, tick at) {
  engine_state state = load_check_state(cfg);
  spatial_snapshot snap = snapshot_at(state, {}, at);
  std::vector<visualization_command> commands;
  bool triggered = false;
  for (const coverage_rule& rule : state.rules) {
    if (auto fired = evaluate_rule(rule, snap)) {
      triggered = true;
      commands.insert(commands.end(), fired->commands.begin(), fired->commands.end());
    }
  }
  std::vector<device_binding> bindings;
  bindings.reserve(commands.size());
  for (const visualization_command& cmd : commands) {
    bindings.push_back(device_binding{cmd, std::nullopt, {}});
  }
  return check_result{triggered, render_xml(bindings)};
}

// ── default event handlers ──────────────────────────────────────────────────
// Incidents are read from event payloads: loc=<x>,<y> names the grid
// location and cap=<capability> the skill needed on site.

inline std::optional<incident> incident_from(const coalesced_event& group) {
  const event_record& rep = group.representative;
  std::optional<grid_point> loc;
  std::string cap;
  for (const auto& [key, value] : rep.payload) {
    if (key == "loc") {
      std::vector<std::string> c = text::split(value, ',');
      if (c.size() == 2) {
        auto x = text::to_int64(c[0]);
        auto y = text::to_int64(c[1]);
        if (x && y) loc = grid_point{*x, *y};
      }
    } else if (key == "cap") {
      cap = value;
    }
  }
  if (!loc || cap.empty()) return std::nullopt;
  return incident{rep.id, *loc, cap, rep.timestamp};
}

// Expert chosen for each incident-bearing event in the current batch,
// keyed by event id.
using batch_assignments = std::map<std::string, std::optional<stakeholder_profile>>;

inline batch_assignments assign_batch(const std::vector<coalesced_event>& groups,
                                      const std::vector<stakeholder_profile>& profiles) {
  std::vector<incident> incidents;
  for (const coalesced_event& g : groups) {
    const std::string& cat = g.representative.category;
    if (cat != "alarm" && cat != "help-request") continue;
    if (auto inc = incident_from(g)) incidents.push_back(std::move(*inc));
  }
  batch_assignments out;
  for (assignment& a : resolve_assignments(incidents, profiles)) {
    out.emplace(a.inc.event_id, std::move(a.expert));
  }
  return out;
}

inline handler_registry make_default_handlers(std::shared_ptr<const batch_assignments> assignments) {
  auto banner_for = [](const coalesced_event& g) {
    return event_banner{g.representative.category, g.representative.id};
  };
  event_handler incident_handler =
      [assignments, banner_for](const coalesced_event& g) -> std::vector<visualization_command> {
    std::vector<visualization_command> commands{banner_for(g)};
    auto it = assignments->find(g.representative.id);
    if (it != assignments->end() && it->second) {
      commands.push_back(display_profile{it->second->id});
    }
    return commands;
  };
  event_handler consulting_handler =
      [banner_for](const coalesced_event& g) -> std::vector<visualization_command> {
    std::vector<visualization_command> commands{banner_for(g)};
    std::string profile = g.representative.source;
    for (const auto& [key, value] : g.representative.payload) {
      if (key == "profile") profile = value;
    }
    commands.push_back(display_profile{profile});
    return commands;
  };
  event_handler fallback =
      [banner_for](const coalesced_event& g) -> std::vector<visualization_command> {
    return {banner_for(g)};
  };
  return handler_registry({
      {"alarm", incident_handler},
      {"help-request", incident_handler},
      {"consulting-request", consulting_handler},
      {"unknown", fallback},
  });
}

// ── replay ──────────────────────────────────────────────────────────────────

struct replay_stats {
  std::size_t events_in = 0;
  std::size_t malformed = 0;
  std::size_t weather_cells = 0;
  std::size_t weather_skipped = 0;
  std::size_t coalesced_groups = 0;
  std::size_t rules_fired = 0;
  std::size_t commands_out = 0;

  std::string summary() const {
    std::ostringstream out;
    out << "events=" << events_in << " malformed=" << malformed
        << " weather-cells=" << weather_cells << " weather-skipped=" << weather_skipped
        << " coalesced-groups=" << coalesced_groups << " rules-fired=" << rules_fired
        << " commands=" << commands_out;
    return out.str();
  }
};

// Dispatches one coalesced group: runs the category handler and binds the
// resulting commands to the assigned expert's device, if any.
inline std::vector<device_binding> process_group(const coalesced_event& group,
                                                 const handler_registry& handlers,
                                                 const batch_assignments& assignments,
                                                 const device_registry& registry) {
  std::vector<visualization_command> commands = dispatch(group, handlers);
  std::vector<std::string> targets;
  auto it = assignments.find(group.representative.id);
  if (it != assignments.end() && it->second) targets.push_back(it->second->device);
  return bind_devices(commands, targets, registry);
}

inline replay_stats run_replay(const engine_config& cfg, std::istream& events_in,
                               std::istream& weather_in, std::ostream& log) {
  engine_state state = load_full_state(cfg);
  replay_stats stats;

  weather_feed_result weather = parse_weather_feed(weather_in);
  stats.weather_cells = weather.cells.size();
  stats.weather_skipped = weather.skipped;
  for (const std::string& reason : weather.skip_reasons) {
    log << "weather: skipped line: " << reason << "\n";
  }
  std::vector<invariant> weather_terms =
      cells_to_invariants(weather.cells, cfg.horizon_ticks);

  // Pull every event through the bounded queue; drain to make room instead
  // of dropping, since replay owns both ends.
  event_intake intake;
  event_queue queue(cfg.queue_capacity);
  std::vector<event_record> events;
  std::string line;
  while (std::getline(events_in, line)) {
    if (text::is_blank_or_comment(line)) continue;
    event_record rec;
    try {
      rec = intake.parse_line(line);
    } catch (const malformed_event& e) {
      stats.malformed += 1;
      log << "events: dropped line: " << e.reason() << "\n";
      continue;
    }
    stats.events_in += 1;
    try {
      queue.enqueue(std::move(rec));
    } catch (const queue_full&) {
      for (event_record& e : queue.dequeue_batch(queue.capacity())) {
        events.push_back(std::move(e));
      }
      queue.enqueue(std::move(rec));
    }
  }
  for (event_record& e : queue.dequeue_batch(queue.capacity())) {
    events.push_back(std::move(e));
  }

  // Coalescing wants timestamp order across the whole replay window.
  std::sort(events.begin(), events.end(), [](const event_record& a, const event_record& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
  });
  std::vector<coalesced_event> groups = coalesce(events, cfg.coalesce_window_ticks);
  stats.coalesced_groups = groups.size();

  // Activity ticks: every weather tick and every group anchor, ascending.
  // Groups anchored at one tick form one batch; experts are assigned per
  // batch, as in serve mode.
  std::set<tick> activity;
  for (const weather_cell& cell : weather.cells) activity.insert(cell.at);
  std::map<tick, std::vector<std::size_t>> groups_at;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    activity.insert(groups[i].first_tick);
    groups_at[groups[i].first_tick].push_back(i);
  }

  xml_emitter emitter(cfg.out_dir, state.registry->default_device());
  for (tick t : activity) {
    std::vector<device_binding> bindings;
    spatial_snapshot snap = snapshot_at(state, weather_terms, t);
    for (const coverage_rule& rule : state.rules) {
      if (auto fired = evaluate_rule(rule, snap)) {
        stats.rules_fired += 1;
        for (const visualization_command& cmd : fired->commands) {
          bindings.push_back(device_binding{cmd, std::nullopt, {}});
        }
      }
    }
    auto at = groups_at.find(t);
    if (at != groups_at.end()) {
      std::vector<coalesced_event> batch;
      for (std::size_t gi : at->second) batch.push_back(groups[gi]);
      auto assignments =
          std::make_shared<batch_assignments>(assign_batch(batch, state.profiles));
      handler_registry handlers = make_default_handlers(assignments);
      for (const coalesced_event& g : batch) {
        std::vector<device_binding> bound =
            process_group(g, handlers, *assignments, *state.registry);
        bindings.insert(bindings.end(), bound.begin(), bound.end());
      }
    }
    emitter.emit_batch(bindings);
  }
  emitter.flush();
  stats.commands_out = emitter.commands_written();
  return stats;
}

// "-" selects standard input for either file.
inline replay_stats run_replay_files(const engine_config& cfg, const std::string& events_path,
                                     const std::string& weather_path, std::ostream& log) {
  std::ifstream events_file, weather_file;
  if (events_path != "-") {
    events_file.open(events_path);
    if (!events_file) throw config_error("cannot open events file " + events_path);
  }
  if (weather_path != "-") {
    weather_file.open(weather_path);
    if (!weather_file) throw config_error("cannot open weather file " + weather_path);
  }
  std::istream& events = events_path == "-" ? std::cin : events_file;
  std::istream& weather = weather_path == "-" ? std::cin : weather_file;
  return run_replay(cfg, events, weather, log);
}

}  // namespace engine

#endif  // ENGINE_RUNTIME_HPP
