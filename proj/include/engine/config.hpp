#ifndef ENGINE_CONFIG_HPP
#define ENGINE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "engine/decision.hpp"
#include "engine/errors.hpp"
#include "engine/ingestion.hpp"
#include "engine/invariant.hpp"
#include "engine/notification.hpp"
#include "engine/pipeline.hpp"
#include "engine/text.hpp"

// Engine configuration and the line-oriented model/rule/profile/registry
// file formats.

namespace engine {

struct engine_config {
  std::vector<std::string> model_files;
  std::string rule_file;
  std::string profile_file;
  std::string registry_file;
  std::size_t queue_capacity = default_queue_capacity;
  std::int64_t coalesce_window_ticks = default_coalesce_window_ticks;
  std::int64_t decomposition_cap = default_decomposition_cap;
  tick horizon_ticks = 10;
  std::int64_t tick_seconds = 60;
  std::string epoch = "1970-01-01T00:00:00Z";
  std::optional<int> listen_port;
  std::string out_dir = "out";
};

// ── config file ─────────────────────────────────────────────────────────────
// Flat key = value lines; '#' starts a comment; the `model` key may repeat.

inline engine_config parse_engine_config(std::istream& in, const std::string& origin) {
  engine_config cfg;
  std::string line;
  int line_no = 0;
  auto where = [&]() { return origin + ":" + std::to_string(line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw config_error(where() + ": expected key = value");
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto int_value = [&]() {
      auto v = text::to_int64(value);
      if (!v) throw config_error(where() + ": " + key + " must be an integer");
      return *v;
    };
    if (key == "model") {
      cfg.model_files.push_back(value);
    } else if (key == "rules") {
      cfg.rule_file = value;
    } else if (key == "profiles") {
      cfg.profile_file = value;
    } else if (key == "registry") {
      cfg.registry_file = value;
    } else if (key == "queue_capacity") {
      cfg.queue_capacity = static_cast<std::size_t>(int_value());
    } else if (key == "coalesce_window") {
      cfg.coalesce_window_ticks = int_value();
    } else if (key == "decomposition_cap") {
      cfg.decomposition_cap = int_value();
    } else if (key == "horizon") {
      cfg.horizon_ticks = int_value();
    } else if (key == "tick_seconds") {
      cfg.tick_seconds = int_value();
    } else if (key == "listen_port") {
      cfg.listen_port = static_cast<int>(int_value());
    } else if (key == "epoch") {
      cfg.epoch = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw config_error(where() + ": unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

inline engine_config load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  return parse_engine_config(in, path);
}

// Checks value invariants and that every referenced file exists.
inline void validate_config(const engine_config& cfg) {
  if (cfg.queue_capacity < 1) throw config_error("queue_capacity must be >= 1");
  if (cfg.coalesce_window_ticks < 1) throw config_error("coalesce_window must be >= 1");
  if (cfg.decomposition_cap < 1) throw config_error("decomposition_cap must be >= 1");
  if (cfg.horizon_ticks < 1) throw config_error("horizon must be >= 1");
  if (cfg.tick_seconds < 1) throw config_error("tick_seconds must be >= 1");
  auto must_exist = [](const std::string& path, const char* what) {
    if (!path.empty() && !std::filesystem::exists(path)) {
      throw config_error(std::string(what) + " file not found: " + path);
    }
  };
  for (const std::string& m : cfg.model_files) must_exist(m, "model");
  must_exist(cfg.rule_file, "rules");
  must_exist(cfg.profile_file, "profiles");
  must_exist(cfg.registry_file, "registry");
}

// ── model files ─────────────────────────────────────────────────────────────
// One invariant term per line; '#' comments.

struct loaded_model {
  std::vector<invariant> terms;
  // file:line per term, parallel to terms; used to place later errors.
  std::vector<std::string> origins;
};

namespace detail {

// Cuts a trailing '#' comment, ignoring '#' inside quoted labels.
inline std::string_view strip_model_comment(std::string_view line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '\\' && in_quote) {
      ++i;
    } else if (c == '"') {
      in_quote = !in_quote;
    } else if (c == '#' && !in_quote) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace detail

inline void load_model_file(const std::string& path, loaded_model& model) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open model file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view term_text = detail::strip_model_comment(line);
    if (text::is_blank_or_comment(term_text)) continue;
    try {
      model.terms.push_back(parse_invariant(term_text));
    } catch (const std::exception& e) {
      throw config_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    model.origins.push_back(path + ":" + std::to_string(line_no));
  }
}

inline loaded_model load_model_files(const std::vector<std::string>& paths) {
  loaded_model model;
  for (const std::string& path : paths) load_model_file(path, model);
  return model;
}

// ── command specs ───────────────────────────────────────────────────────────
// Textual form of a visualization command, used in rule reactions and in
// binding lists for the render tool:
//   banner category=<s> id=<s>
//   display profile=<s>
//   image file=<s> [rect=<x>,<y>,<w>,<h>]... [text=<x>,<y>,<color>,<text>]...
//   map lat=<dec> long=<dec> zoom=<s>
//   earth lat=<dec> long=<dec> height=<s>
// plus an optional device=<id>. Overlay order follows token order.

struct command_spec {
  visualization_command command;
  std::optional<std::string> device;
};

namespace detail {

inline std::int64_t spec_int(const std::string& v, const std::string& what) {
  auto n = text::to_int64(v);
  if (!n) throw config_error(what + " is not an integer: \"" + v + "\"");
  return *n;
}

}  // namespace detail

inline command_spec parse_command_spec(const std::vector<text::token>& tokens,
                                       std::size_t first) {
  if (first >= tokens.size() || !tokens[first].key.empty()) {
    throw config_error("command spec must start with a command kind");
  }
  const std::string& kind = tokens[first].value;
  std::map<std::string, std::string> kv;
  std::optional<std::string> device;
  std::vector<overlay> overlays;
  for (std::size_t i = first + 1; i < tokens.size(); ++i) {
    const text::token& tok = tokens[i];
    if (tok.key.empty()) throw config_error("unexpected bare token \"" + tok.value + "\"");
    if (tok.key == "device") {
      device = tok.value;
    } else if (tok.key == "rect") {
      std::vector<std::string> parts = text::split(tok.value, ',');
      if (parts.size() != 4) throw config_error("rect needs x,y,w,h");
      rect_overlay r{detail::spec_int(parts[0], "rect x"), detail::spec_int(parts[1], "rect y"),
                     detail::spec_int(parts[2], "rect w"), detail::spec_int(parts[3], "rect h")};
      if (r.w < 0 || r.h < 0) throw config_error("rect size must be >= 0");
      overlays.push_back(r);
    } else if (tok.key == "text") {
      std::vector<std::string> parts = text::split(tok.value, ',');
      if (parts.size() < 4) throw config_error("text needs x,y,color,text");
      std::string body = parts[3];
      for (std::size_t j = 4; j < parts.size(); ++j) body += "," + parts[j];
      overlays.push_back(text_overlay{body, detail::spec_int(parts[0], "text x"),
                                      detail::spec_int(parts[1], "text y"), parts[2]});
    } else {
      kv[tok.key] = tok.value;
    }
  }
  auto need = [&kv, &kind](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end())
      throw config_error(kind + " command is missing " + std::string(key) + "=");
    return it->second;
  };

  command_spec spec{visualization_command{event_banner{}}, std::move(device)};
  if (kind == "banner") {
    spec.command = event_banner{need("category"), need("id")};
  } else if (kind == "display") {
    spec.command = display_profile{need("profile")};
  } else if (kind == "image") {
    spec.command = composite_image{need("file"), std::move(overlays)};
  } else if (kind == "map" || kind == "earth") {
    std::string lat = need("lat");
    std::string lon = need("long");
    if (!valid_lat_lon(lat, lon)) throw config_error(kind + ": lat/long out of range");
    if (kind == "map") {
      spec.command = map_view{std::move(lat), std::move(lon), need("zoom")};
    } else {
      spec.command = earth_view{std::move(lat), std::move(lon), need("height")};
    }
  } else {
    throw config_error("unknown command kind \"" + kind + "\"");
  }
  return spec;
}

inline command_spec parse_command_spec(std::string_view line) {
  std::vector<text::token> tokens;
  try {
    tokens = text::split_line(line);
  } catch (const std::exception& e) {
    throw config_error(std::string("bad command spec: ") + e.what());
  }
  return parse_command_spec(tokens, 0);
}

// Binding list file: one command spec per line, '#' comments.
inline std::vector<device_binding> parse_binding_file(std::istream& in,
                                                      const std::string& origin) {
  std::vector<device_binding> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    try {
      command_spec spec = parse_command_spec(line);
      out.push_back(device_binding{std::move(spec.command), std::move(spec.device), {}});
    } catch (const std::exception& e) {
      throw config_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ── rule files ──────────────────────────────────────────────────────────────
// rule id=<s> window=<t1>..<t2> owner=<s> area=<x1>,<y1>,<x2>,<y2>[;...]
//      threshold=<0..1> reaction=<label> [cmd="<command spec>"]...

namespace detail {

inline tick_interval parse_window(const std::string& v, const std::string& where) {
  std::size_t dots = v.find("..");
  if (dots == std::string::npos) throw config_error(where + ": window needs t1..t2");
  auto a = text::to_int64(v.substr(0, dots));
  auto b = text::to_int64(v.substr(dots + 2));
  if (!a || !b) throw config_error(where + ": window bounds must be integers");
  if (*a > *b) throw config_error(where + ": window start exceeds end");
  return tick_interval(*a, *b);
}

inline std::vector<box> parse_areas(const std::string& v, const std::string& where) {
  std::vector<box> areas;
  for (const std::string& part : text::split(v, ';')) {
    if (part.empty()) continue;
    std::vector<std::string> c = text::split(part, ',');
    if (c.size() != 4) throw config_error(where + ": area needs x1,y1,x2,y2");
    auto x1 = text::to_int64(c[0]);
    auto y1 = text::to_int64(c[1]);
    auto x2 = text::to_int64(c[2]);
    auto y2 = text::to_int64(c[3]);
    if (!x1 || !y1 || !x2 || !y2)
      throw config_error(where + ": area coordinates must be integers");
    areas.emplace_back(*x1, *y1, *x2, *y2);
  }
  if (areas.empty()) throw config_error(where + ": rule needs at least one area");
  return areas;
}

}  // namespace detail

inline std::vector<coverage_rule> parse_rule_file(std::istream& in, const std::string& origin) {
  std::vector<coverage_rule> rules;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::vector<text::token> tokens;
    try {
      tokens = text::split_line(line);
    } catch (const std::exception& e) {
      throw config_error(where + ": " + e.what());
    }
    if (tokens.empty() || !tokens[0].key.empty() || tokens[0].value != "rule") {
      throw config_error(where + ": expected a rule record");
    }
    coverage_rule rule;
    bool have_window = false, have_threshold = false, have_areas = false;
    try {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const text::token& tok = tokens[i];
        if (tok.key == "id") {
          rule.id = tok.value;
        } else if (tok.key == "window") {
          rule.window = detail::parse_window(tok.value, where);
          have_window = true;
        } else if (tok.key == "owner") {
          rule.owner_label = tok.value;
        } else if (tok.key == "area") {
          rule.areas = detail::parse_areas(tok.value, where);
          have_areas = true;
        } else if (tok.key == "threshold") {
          auto v = text::to_double(tok.value);
          if (!v || *v < 0.0 || *v > 1.0)
            throw config_error(where + ": threshold must be in [0,1]");
          rule.threshold = *v;
          have_threshold = true;
        } else if (tok.key == "reaction") {
          rule.reaction.label = tok.value;
        } else if (tok.key == "cmd") {
          command_spec spec = parse_command_spec(tok.value);
          if (spec.device) {
            throw config_error(where + ": rule commands are device-independent");
          }
          rule.reaction.commands.push_back(std::move(spec.command));
        } else {
          throw config_error(where + ": unknown key \"" + tok.key + "\"");
        }
      }
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw config_error(where + ": " + e.what());
    }
    if (rule.id.empty()) throw config_error(where + ": rule needs id=");
    if (!have_window) throw config_error(where + ": rule needs window=");
    if (rule.owner_label.empty()) throw config_error(where + ": rule needs owner=");
    if (!have_areas) throw config_error(where + ": rule needs area=");
    if (!have_threshold) throw config_error(where + ": rule needs threshold=");
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline std::vector<coverage_rule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open rule file " + path);
  return parse_rule_file(in, path);
}

// ── profile files ───────────────────────────────────────────────────────────
// profile id=<s> caps=<c1>,<c2>,... avail=<t1>..<t2>[,...] loc=<x>,<y> device=<s>

inline std::vector<stakeholder_profile> parse_profile_file(std::istream& in,
                                                           const std::string& origin) {
  std::vector<stakeholder_profile> profiles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::vector<text::token> tokens;
    try {
      tokens = text::split_line(line);
    } catch (const std::exception& e) {
      throw config_error(where + ": " + e.what());
    }
    if (tokens.empty() || !tokens[0].key.empty() || tokens[0].value != "profile") {
      throw config_error(where + ": expected a profile record");
    }
    stakeholder_profile p;
    bool have_loc = false;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const text::token& tok = tokens[i];
      if (tok.key == "id") {
        p.id = tok.value;
      } else if (tok.key == "caps") {
        for (const std::string& c : text::split(tok.value, ',')) {
          if (!c.empty()) p.capabilities.insert(c);
        }
      } else if (tok.key == "avail") {
        for (const std::string& iv : text::split(tok.value, ',')) {
          if (iv.empty()) continue;
          p.availability.push_back(detail::parse_window(iv, where));
        }
      } else if (tok.key == "loc") {
        std::vector<std::string> c = text::split(tok.value, ',');
        if (c.size() != 2) throw config_error(where + ": loc needs x,y");
        auto x = text::to_int64(c[0]);
        auto y = text::to_int64(c[1]);
        if (!x || !y) throw config_error(where + ": loc coordinates must be integers");
        p.location = grid_point{*x, *y};
        have_loc = true;
      } else if (tok.key == "device") {
        p.device = tok.value;
      } else {
        throw config_error(where + ": unknown key \"" + tok.key + "\"");
      }
    }
    if (p.id.empty()) throw config_error(where + ": profile needs id=");
    if (!have_loc) throw config_error(where + ": profile needs loc=");
    if (p.device.empty()) throw config_error(where + ": profile needs device=");
    // availability must be pairwise disjoint
    std::sort(p.availability.begin(), p.availability.end());
    for (std::size_t i = 1; i < p.availability.size(); ++i) {
      if (p.availability[i].lo <= p.availability[i - 1].hi) {
        throw config_error(where + ": availability intervals overlap");
      }
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

inline std::vector<stakeholder_profile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open profile file " + path);
  return parse_profile_file(in, path);
}

// ── device registry files ───────────────────────────────────────────────────
// device id=<s> caps=<banner|display|image|map|earth>,... [default=true]

inline device_registry parse_registry_file(std::istream& in, const std::string& origin) {
  std::map<std::string, std::set<device_capability>> devices;
  std::optional<std::string> default_device;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank_or_comment(line)) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::vector<text::token> tokens;
    try {
      tokens = text::split_line(line);
    } catch (const std::exception& e) {
      throw config_error(where + ": " + e.what());
    }
    if (tokens.empty() || !tokens[0].key.empty() || tokens[0].value != "device") {
      throw config_error(where + ": expected a device record");
    }
    std::string id;
    std::set<device_capability> caps;
    bool is_default = false;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const text::token& tok = tokens[i];
      if (tok.key == "id") {
        id = tok.value;
      } else if (tok.key == "caps") {
        for (const std::string& c : text::split(tok.value, ',')) {
          if (c.empty()) continue;
          auto cap = capability_from_name(c);
          if (!cap) throw config_error(where + ": unknown capability \"" + c + "\"");
          caps.insert(*cap);
        }
      } else if (tok.key == "default") {
        is_default = tok.value == "true";
      } else {
        throw config_error(where + ": unknown key \"" + tok.key + "\"");
      }
    }
    if (id.empty()) throw config_error(where + ": device needs id=");
    if (devices.count(id)) throw config_error(where + ": duplicate device \"" + id + "\"");
    devices[id] = std::move(caps);
    if (is_default) {
      if (default_device) throw config_error(where + ": more than one default device");
      default_device = id;
    }
  }
  if (!default_device) throw config_error(origin + ": no default device declared");
  return device_registry(std::move(devices), std::move(*default_device));
}

inline device_registry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open registry file " + path);
  return parse_registry_file(in, path);
}

}  // namespace engine

#endif  // ENGINE_CONFIG_HPP
