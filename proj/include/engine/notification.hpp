#ifndef ENGINE_NOTIFICATION_HPP
#define ENGINE_NOTIFICATION_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "engine/errors.hpp"
#include "engine/text.hpp"

// Visualization commands, the XML wire format that carries them, and the
// binding of device-independent commands to concrete devices.

namespace engine {

// ── command model ───────────────────────────────────────────────────────────

struct rect_overlay {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;  // >= 0
  std::int64_t h = 0;  // >= 0
  bool operator==(const rect_overlay&) const = default;
};

struct text_overlay {
  std::string text;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::string color;
  bool operator==(const text_overlay&) const = default;
};

using overlay = std::variant<rect_overlay, text_overlay>;

struct event_banner {
  std::string category;
  std::string id;
  bool operator==(const event_banner&) const = default;
};

struct display_profile {
  std::string profile;
  bool operator==(const display_profile&) const = default;
};

struct composite_image {
  std::string image;
  std::vector<overlay> overlays;  // order preserved
  bool operator==(const composite_image&) const = default;
};

// Map and earth views keep their coordinates as the decimal text they were
// given, so output preserves the full stated precision byte for byte.
struct map_view {
  std::string lat;
  std::string lon;
  std::string zoom;  // e.g. "15z"
  bool operator==(const map_view&) const = default;
};

struct earth_view {
  std::string lat;
  std::string lon;
  std::string height;  // e.g. "100m"
  bool operator==(const earth_view&) const = default;
};

using visualization_command =
    std::variant<event_banner, display_profile, composite_image, map_view, earth_view>;

// True when the strings are in-range decimal degrees.
inline bool valid_lat_lon(std::string_view lat, std::string_view lon) {
  auto la = text::to_double(lat);
  auto lo = text::to_double(lon);
  return la && lo && -90.0 <= *la && *la <= 90.0 && -180.0 <= *lo && *lo <= 180.0;
}

enum class device_capability : std::uint8_t { banner, display, image, map, earth };

inline device_capability capability_of(const visualization_command& cmd) {
  struct visitor {
    device_capability operator()(const event_banner&) const { return device_capability::banner; }
    device_capability operator()(const display_profile&) const {
      return device_capability::display;
    }
    device_capability operator()(const composite_image&) const {
      return device_capability::image;
    }
    device_capability operator()(const map_view&) const { return device_capability::map; }
    device_capability operator()(const earth_view&) const { return device_capability::earth; }
  };
  return std::visit(visitor{}, cmd);
}

inline std::optional<device_capability> capability_from_name(std::string_view name) {
  if (name == "banner") return device_capability::banner;
  if (name == "display") return device_capability::display;
  if (name == "image") return device_capability::image;
  if (name == "map") return device_capability::map;
  if (name == "earth") return device_capability::earth;
  return std::nullopt;
}

inline const char* capability_name(device_capability c) {
  switch (c) {
    case device_capability::banner: return "banner";
    case device_capability::display: return "display";
    case device_capability::image: return "image";
    case device_capability::map: return "map";
    case device_capability::earth: return "earth";
  }
  return "?";
}

// A command addressed to a device; an absent device means the binding is
// device-independent. extras carries unknown attributes seen on parse.
struct device_binding {
  visualization_command command;
  std::optional<std::string> device;
  std::vector<std::pair<std::string, std::string>> extras;

  bool operator==(const device_binding&) const = default;
};

// Device capabilities plus the fallback device for commands a target device
// cannot show. The default device must be present in the mapping.
class device_registry {
 public:
  device_registry(std::map<std::string, std::set<device_capability>> devices,
                  std::string default_device)
      : devices_(std::move(devices)), default_device_(std::move(default_device)) {
    if (devices_.find(default_device_) == devices_.end()) {
      throw config_error("device registry: default device \"" + default_device_ +
                         "\" is not in the mapping");
    }
  }

  bool known(const std::string& device) const { return devices_.count(device) > 0; }

  bool supports(const std::string& device, device_capability cap) const {
    auto it = devices_.find(device);
    return it != devices_.end() && it->second.count(cap) > 0;
  }

  const std::string& default_device() const { return default_device_; }
  const std::map<std::string, std::set<device_capability>>& devices() const {
    return devices_;
  }

 private:
  std::map<std::string, std::set<device_capability>> devices_;
  std::string default_device_;
};

// Binds each command to each target device when the device supports the
// command's kind, otherwise to the default device. Target-major ordering.
// With no targets the commands pass through device-independent.
inline std::vector<device_binding> bind_devices(
    const std::vector<visualization_command>& commands,
    const std::vector<std::string>& target_devices, const device_registry& registry) {
  std::vector<device_binding> out;
  if (target_devices.empty()) {
    out.reserve(commands.size());
    for (const auto& cmd : commands) {
      out.push_back(device_binding{cmd, std::nullopt, {}});
    }
    return out;
  }
  out.reserve(commands.size() * target_devices.size());
  for (const std::string& device : target_devices) {
    for (const auto& cmd : commands) {
      const bool ok = registry.supports(device, capability_of(cmd));
      out.push_back(device_binding{cmd, ok ? device : registry.default_device(), {}});
    }
  }
  return out;
}

// ── XML rendering ───────────────────────────────────────────────────────────
// One <command> element per binding inside an <output> root. Attribute order
// is fixed (device first when present, then type, then the per-kind
// attributes) so output is deterministic byte for byte.

namespace detail {

inline void xml_escape_into(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
}

inline void attr_into(std::string& out, std::string_view name, std::string_view value) {
  out.push_back(' ');
  out += name;
  out += "=\"";
  xml_escape_into(out, value);
  out.push_back('"');
}

inline void attr_into(std::string& out, std::string_view name, std::int64_t value) {
  attr_into(out, name, std::to_string(value));
}

inline void render_command_into(std::string& out, const device_binding& binding) {
  out += "<command";
  if (binding.device) attr_into(out, "device", *binding.device);

  struct visitor {
    std::string& out;
    void operator()(const event_banner& c) const {
      attr_into(out, "type", "event");
      attr_into(out, "category", c.category);
      attr_into(out, "id", c.id);
      out += "></command>\n";
    }
    void operator()(const display_profile& c) const {
      attr_into(out, "type", "display");
      attr_into(out, "profile", c.profile);
      out += "></command>\n";
    }
    void operator()(const composite_image& c) const {
      attr_into(out, "type", "composite_image");
      attr_into(out, "image", c.image);
      out += ">\n";
      for (const overlay& ov : c.overlays) {
        out += "<display";
        if (const auto* r = std::get_if<rect_overlay>(&ov)) {
          attr_into(out, "type", "rect");
          attr_into(out, "x", r->x);
          attr_into(out, "y", r->y);
          attr_into(out, "w", r->w);
          attr_into(out, "h", r->h);
        } else {
          const auto& t = std::get<text_overlay>(ov);
          attr_into(out, "type", "text");
          attr_into(out, "text", t.text);
          attr_into(out, "x", t.x);
          attr_into(out, "y", t.y);
          attr_into(out, "color", t.color);
        }
        out += "></display>\n";
      }
      out += "</command>\n";
    }
    void operator()(const earth_view& c) const {
      attr_into(out, "type", "earth");
      attr_into(out, "lat", c.lat);
      attr_into(out, "long", c.lon);
      attr_into(out, "height", c.height);
      out += "></command>\n";
    }
    void operator()(const map_view& c) const {
      attr_into(out, "type", "map");
      attr_into(out, "lat", c.lat);
      attr_into(out, "long", c.lon);
      attr_into(out, "zoom", c.zoom);
      out += "></command>\n";
    }
  };
  std::visit(visitor{out}, binding.command);
}

}  // namespace detail

inline std::string render_xml(const std::vector<device_binding>& bindings) {
  if (bindings.empty()) return "<output></output>\n";
  std::string out = "<output>\n";
  for (const device_binding& b : bindings) {
    detail::render_command_into(out, b);
  }
  out += "</output>\n";
  return out;
}

// ── XML parsing ─────────────────────────────────────────────────────────────
// Restricted XML reader for the dialect above. Also accepts two legacy
// forms: the misspelled `catagory` attribute on event commands, and the flat
// `view`/`display image=` annotated-image form, which is normalized to
// composite_image.

namespace detail {

struct xml_attr {
  std::string name;
  std::string value;
};

struct xml_element {
  std::string name;
  std::vector<xml_attr> attrs;
  std::vector<xml_element> children;
  std::size_t offset = 0;
};

class xml_reader {
 public:
  explicit xml_reader(std::string_view text) : text_(text) {}

  xml_element parse_document() {
    skip_misc();
    xml_element root = parse_element();
    skip_misc();
    if (pos_ != text_.size()) throw xml_error(pos_, "trailing content after root element");
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (text_.compare(pos_, 4, "<!--") == 0) {
        std::size_t end = text_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) throw xml_error(pos_, "unterminated comment");
        pos_ = end + 3;
        continue;
      }
      if (text_.compare(pos_, 2, "<?") == 0) {
        std::size_t end = text_.find("?>", pos_ + 2);
        if (end == std::string_view::npos)
          throw xml_error(pos_, "unterminated processing instruction");
        pos_ = end + 2;
        continue;
      }
      return;
    }
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
           c == '.';
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    if (pos_ == start) throw xml_error(pos_, "expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw, std::size_t at) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) throw xml_error(at + i, "unterminated entity");
      std::string_view name = raw.substr(i + 1, semi - i - 1);
      if (name == "amp") out.push_back('&');
      else if (name == "lt") out.push_back('<');
      else if (name == "gt") out.push_back('>');
      else if (name == "quot") out.push_back('"');
      else if (name == "apos") out.push_back('\'');
      else throw xml_error(at + i, "unknown entity");
      i = semi;
    }
    return out;
  }

  xml_attr parse_attr() {
    xml_attr a;
    a.name = parse_name();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '=') throw xml_error(pos_, "expected '='");
    ++pos_;
    skip_ws();
    if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
      throw xml_error(pos_, "expected quoted attribute value");
    char q = text_[pos_++];
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != q && text_[pos_] != '<') ++pos_;
    if (pos_ >= text_.size() || text_[pos_] != q)
      throw xml_error(start, "unterminated attribute value");
    a.value = decode_entities(text_.substr(start, pos_ - start), start);
    ++pos_;
    return a;
  }

  xml_element parse_element() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '<') throw xml_error(pos_, "expected '<'");
    xml_element el;
    el.offset = pos_;
    ++pos_;
    el.name = parse_name();
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) throw xml_error(pos_, "unterminated start tag");
      if (text_[pos_] == '/') {
        if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '>')
          throw xml_error(pos_, "expected '/>'");
        pos_ += 2;
        return el;  // self-closing
      }
      if (text_[pos_] == '>') {
        ++pos_;
        break;
      }
      el.attrs.push_back(parse_attr());
    }
    // content: child elements and whitespace until the end tag
    while (true) {
      skip_misc();
      if (pos_ >= text_.size()) throw xml_error(pos_, "missing end tag for <" + el.name + ">");
      if (text_[pos_] == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        std::size_t at = pos_;
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != el.name)
          throw xml_error(at, "mismatched end tag </" + closing + "> for <" + el.name + ">");
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '>') throw xml_error(pos_, "expected '>'");
        ++pos_;
        return el;
      }
      if (text_[pos_] == '<') {
        el.children.push_back(parse_element());
        continue;
      }
      throw xml_error(pos_, "unexpected text content");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline const std::string* find_attr(const xml_element& el, std::string_view name) {
  for (const xml_attr& a : el.attrs) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

inline std::string need_attr(const xml_element& el, std::string_view name) {
  const std::string* v = find_attr(el, name);
  if (!v) {
    throw xml_error(el.offset,
                    "<" + el.name + "> is missing attribute \"" + std::string(name) + "\"");
  }
  return *v;
}

inline std::int64_t need_int_attr(const xml_element& el, std::string_view name) {
  auto v = text::to_int64(need_attr(el, name));
  if (!v) {
    throw xml_error(el.offset, "attribute \"" + std::string(name) + "\" of <" + el.name +
                                   "> is not an integer");
  }
  return *v;
}

inline overlay parse_overlay(const xml_element& el) {
  if (el.name != "display") throw xml_error(el.offset, "expected <display> overlay");
  std::string type = need_attr(el, "type");
  if (type == "rect") {
    rect_overlay r{need_int_attr(el, "x"), need_int_attr(el, "y"), need_int_attr(el, "w"),
                   need_int_attr(el, "h")};
    if (r.w < 0 || r.h < 0) throw xml_error(el.offset, "rect overlay with negative size");
    return r;
  }
  if (type == "text") {
    return text_overlay{need_attr(el, "text"), need_int_attr(el, "x"),
                        need_int_attr(el, "y"), need_attr(el, "color")};
  }
  throw xml_error(el.offset, "unknown overlay type \"" + type + "\"");
}

// Legacy flat annotated-image command: rectx/recty/rectw/recth and
// text/txtx/txty attributes instead of nested <display> overlays.
inline composite_image parse_legacy_image(const xml_element& el,
                                          std::set<std::string>& consumed) {
  composite_image img;
  img.image = need_attr(el, "image");
  consumed.insert("image");
  if (find_attr(el, "rectx")) {
    rect_overlay r{need_int_attr(el, "rectx"), need_int_attr(el, "recty"),
                   need_int_attr(el, "rectw"), need_int_attr(el, "recth")};
    img.overlays.push_back(r);
    consumed.insert({"rectx", "recty", "rectw", "recth"});
  }
  if (find_attr(el, "text")) {
    const std::string* color = find_attr(el, "color");
    text_overlay t{need_attr(el, "text"), need_int_attr(el, "txtx"), need_int_attr(el, "txty"),
                   color ? *color : "red"};
    img.overlays.push_back(t);
    consumed.insert({"text", "txtx", "txty", "color"});
  }
  return img;
}

inline device_binding parse_command(const xml_element& el) {
  if (el.name != "command") throw xml_error(el.offset, "expected <command>");
  const std::string* type = find_attr(el, "type");
  if (!type) throw xml_error(el.offset, "<command> is missing attribute \"type\"");

  device_binding binding{visualization_command{event_banner{}}, std::nullopt, {}};
  std::set<std::string> consumed{"type"};
  if (const std::string* dev = find_attr(el, "device")) {
    binding.device = *dev;
    consumed.insert("device");
  }

  auto no_children = [&el]() {
    if (!el.children.empty())
      throw xml_error(el.offset, "<command type=\"" + need_attr(el, "type") +
                                     "\"> does not take child elements");
  };

  if (*type == "event") {
    // The legacy dialect misspells category.
    const std::string* cat = find_attr(el, "category");
    if (!cat) cat = find_attr(el, "catagory");
    if (!cat) throw xml_error(el.offset, "<command> is missing attribute \"category\"");
    binding.command = event_banner{*cat, need_attr(el, "id")};
    consumed.insert({"category", "catagory", "id"});
    no_children();
  } else if (*type == "display" && !find_attr(el, "image")) {
    binding.command = display_profile{need_attr(el, "profile")};
    consumed.insert("profile");
    no_children();
  } else if (*type == "view" || *type == "display") {
    binding.command = parse_legacy_image(el, consumed);
    no_children();
  } else if (*type == "composite_image") {
    composite_image img;
    img.image = need_attr(el, "image");
    consumed.insert("image");
    for (const xml_element& child : el.children) {
      img.overlays.push_back(parse_overlay(child));
    }
    binding.command = std::move(img);
  } else if (*type == "map" || *type == "earth") {
    std::string lat = need_attr(el, "lat");
    std::string lon = need_attr(el, "long");
    if (!valid_lat_lon(lat, lon))
      throw xml_error(el.offset, "lat/long out of range or not decimal");
    if (*type == "map") {
      binding.command = map_view{std::move(lat), std::move(lon), need_attr(el, "zoom")};
      consumed.insert("zoom");
    } else {
      binding.command = earth_view{std::move(lat), std::move(lon), need_attr(el, "height")};
      consumed.insert("height");
    }
    consumed.insert({"lat", "long"});
    no_children();
  } else {
    throw unknown_command_type(*type);
  }

  for (const xml_attr& a : el.attrs) {
    if (consumed.count(a.name) == 0) binding.extras.emplace_back(a.name, a.value);
  }
  return binding;
}

}  // namespace detail

inline std::vector<device_binding> parse_xml(std::string_view text) {
  detail::xml_reader reader(text);
  detail::xml_element root = reader.parse_document();
  if (root.name != "output") throw xml_error(root.offset, "root element must be <output>");
  std::vector<device_binding> out;
  out.reserve(root.children.size());
  for (const detail::xml_element& child : root.children) {
    out.push_back(detail::parse_command(child));
  }
  return out;
}

}  // namespace engine

#endif  // ENGINE_NOTIFICATION_HPP
