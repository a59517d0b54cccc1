#ifndef ENGINE_DECISION_HPP
#define ENGINE_DECISION_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "engine/notification.hpp"
#include "engine/pipeline.hpp"
#include "engine/reasoning.hpp"

// Rule evaluation (a condition triggers a reaction) and matching of staff
// to incidents by capability, availability, and proximity.

namespace engine {

// Closed tick interval, normalized at construction.
struct tick_interval {
  tick lo = 0;
  tick hi = 0;

  tick_interval() = default;
  tick_interval(tick a, tick b) : lo(a < b ? a : b), hi(a < b ? b : a) {}

  bool contains(tick t) const { return lo <= t && t <= hi; }
  auto operator<=>(const tick_interval&) const = default;
};

// Commands to emit when a rule fires. String fields may carry the
// placeholders {time}, {rule-id}, and {areas}, resolved at trigger time.
struct reaction_template {
  std::string label;
  std::vector<visualization_command> commands;

  bool operator==(const reaction_template&) const = default;
};

struct coverage_rule {
  std::string id;
  tick_interval window;
  std::string owner_label;
  std::vector<box> areas;  // non-empty; coverage must reach threshold in all
  double threshold = 0.0;  // in [0, 1]
  reaction_template reaction;
};

struct stakeholder_profile {
  std::string id;
  std::set<std::string> capabilities;
  std::vector<tick_interval> availability;  // normalized, pairwise disjoint
  grid_point location;
  std::string device;

  bool operator==(const stakeholder_profile&) const = default;
};

struct incident {
  std::string event_id;
  grid_point location;
  std::string required_capability;
  tick time = 0;
};

struct triggered_reaction {
  std::string rule_id;
  std::string label;
  tick time = 0;
  std::vector<visualization_command> commands;
};

// ── placeholder substitution ────────────────────────────────────────────────

namespace detail {

inline std::string substitute_placeholders(std::string_view s,
                                           const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '{') {
      std::size_t close = s.find('}', i);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(s.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline visualization_command substitute_in_command(
    const visualization_command& cmd, const std::map<std::string, std::string>& values) {
  struct visitor {
    const std::map<std::string, std::string>& values;
    std::string sub(const std::string& s) const { return substitute_placeholders(s, values); }

    visualization_command operator()(const event_banner& c) const {
      return event_banner{sub(c.category), sub(c.id)};
    }
    visualization_command operator()(const display_profile& c) const {
      return display_profile{sub(c.profile)};
    }
    visualization_command operator()(const composite_image& c) const {
      composite_image out;
      out.image = sub(c.image);
      for (const overlay& ov : c.overlays) {
        if (const auto* t = std::get_if<text_overlay>(&ov)) {
          out.overlays.push_back(text_overlay{sub(t->text), t->x, t->y, sub(t->color)});
        } else {
          out.overlays.push_back(ov);
        }
      }
      return out;
    }
    visualization_command operator()(const map_view& c) const {
      return map_view{c.lat, c.lon, sub(c.zoom)};
    }
    visualization_command operator()(const earth_view& c) const {
      return earth_view{c.lat, c.lon, sub(c.height)};
    }
  };
  return std::visit(visitor{values}, cmd);
}

inline std::string format_areas(const std::vector<box>& areas) {
  std::string out;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    if (i) out.push_back(';');
    out += std::to_string(areas[i].x1) + "," + std::to_string(areas[i].y1) + "," +
           std::to_string(areas[i].x2) + "," + std::to_string(areas[i].y2);
  }
  return out;
}

}  // namespace detail

// ── rule evaluation ─────────────────────────────────────────────────────────

// Fires iff the snapshot time lies in the rule window and the owner's
// coverage reaches the threshold in every area (inclusive comparison).
inline std::optional<triggered_reaction> evaluate_rule(const coverage_rule& rule,
                                                       const spatial_snapshot& snapshot) {
  if (!rule.window.contains(snapshot.time)) return std::nullopt;
  for (const box& area : rule.areas) {
    if (coverage(snapshot, rule.owner_label, area) < rule.threshold) return std::nullopt;
  }
  const std::map<std::string, std::string> values{
      {"time", std::to_string(snapshot.time)},
      {"rule-id", rule.id},
      {"areas", detail::format_areas(rule.areas)},
  };
  triggered_reaction fired;
  fired.rule_id = rule.id;
  fired.label = detail::substitute_placeholders(rule.reaction.label, values);
  fired.time = snapshot.time;
  fired.commands.reserve(rule.reaction.commands.size());
  for (const visualization_command& cmd : rule.reaction.commands) {
    fired.commands.push_back(detail::substitute_in_command(cmd, values));
  }
  return fired;
}

// ── expert matching ─────────────────────────────────────────────────────────

inline bool available_at(const stakeholder_profile& profile, tick t) {
  for (const tick_interval& iv : profile.availability) {
    if (iv.contains(t)) return true;
  }
  return false;
}

namespace detail {

inline unsigned __int128 squared_distance(grid_point a, grid_point b) {
  __int128 dx = static_cast<__int128>(a.x) - static_cast<__int128>(b.x);
  __int128 dy = static_cast<__int128>(a.y) - static_cast<__int128>(b.y);
  return static_cast<unsigned __int128>(dx * dx + dy * dy);
}

}  // namespace detail

// Capable and available profiles, nearest first (Euclidean distance on the
// grid), ties broken by id so the order is reproducible.
inline std::vector<stakeholder_profile> match_experts(
    const incident& inc, const std::vector<stakeholder_profile>& profiles) {
  std::vector<stakeholder_profile> out;
  for (const stakeholder_profile& p : profiles) {
    if (p.capabilities.count(inc.required_capability) == 0) continue;
    if (!available_at(p, inc.time)) continue;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(),
            [&inc](const stakeholder_profile& a, const stakeholder_profile& b) {
              auto da = detail::squared_distance(a.location, inc.location);
              auto db = detail::squared_distance(b.location, inc.location);
              if (da != db) return da < db;
              return a.id < b.id;
            });
  return out;
}

struct assignment {
  incident inc;
  std::optional<stakeholder_profile> expert;
};

// Greedy conflict resolution: incidents in (time, id) order each take their
// best-ranked expert not already taken. An expert serves at most one
// incident.
inline std::vector<assignment> resolve_assignments(
    const std::vector<incident>& incidents, const std::vector<stakeholder_profile>& profiles) {
  std::vector<incident> ordered = incidents;
  std::sort(ordered.begin(), ordered.end(), [](const incident& a, const incident& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event_id < b.event_id;
  });
  std::set<std::string> taken;
  std::vector<assignment> out;
  out.reserve(ordered.size());
  for (const incident& inc : ordered) {
    std::optional<stakeholder_profile> chosen;
    for (const stakeholder_profile& candidate : match_experts(inc, profiles)) {
      if (taken.count(candidate.id) == 0) {
        chosen = candidate;
        taken.insert(candidate.id);
        break;
      }
    }
    out.push_back(assignment{inc, std::move(chosen)});
  }
  return out;
}

// ── confidence check hook ───────────────────────────────────────────────────
// Gate before acting on a sensor incident: require at least
// min_corroborating events (the triggering one included) from sources
// within `radius` grid units during the last `window_ticks`. The default of
// one corroborating event makes the check a pass-through.

struct confidence_policy {
  int min_corroborating = 1;
  std::int64_t radius = 0;
  tick window_ticks = 0;
};

inline bool confidence_passes(const confidence_policy& policy, const incident& inc,
                              const std::vector<event_record>& recent,
                              const std::map<std::string, grid_point>& source_locations) {
  if (policy.min_corroborating <= 1) return true;
  const unsigned __int128 radius_sq =
      static_cast<unsigned __int128>(policy.radius) * static_cast<unsigned __int128>(policy.radius);
  int corroborating = 0;
  for (const event_record& e : recent) {
    if (e.timestamp < inc.time - policy.window_ticks || e.timestamp > inc.time) continue;
    auto it = source_locations.find(e.source);
    if (it == source_locations.end()) continue;
    if (detail::squared_distance(it->second, inc.location) > radius_sq) continue;
    ++corroborating;
  }
  return corroborating >= policy.min_corroborating;
}

// Overload taking the stakeholders themselves; only their device ids matter
// for binding.
inline std::vector<device_binding> bind_devices(
    const std::vector<visualization_command>& commands,
    const std::vector<stakeholder_profile>& targets, const device_registry& registry) {
  std::vector<std::string> devices;
  devices.reserve(targets.size());
  for (const stakeholder_profile& p : targets) devices.push_back(p.device);
  return bind_devices(commands, devices, registry);
}

}  // namespace engine

#endif  // ENGINE_DECISION_HPP
