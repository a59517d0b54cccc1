#ifndef ENGINE_INVARIANT_HPP
#define ENGINE_INVARIANT_HPP

#include <array>
#include <cassert>
#include <cctype>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "engine/errors.hpp"
#include "engine/text.hpp"

// The invariant term language: an algebraic term type for spatio-temporal
// conditions, its textual syntax, three-valued evaluation, and
// semantics-preserving simplification.

namespace engine {

using tick = std::int64_t;

struct grid_point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const grid_point&) const = default;
};

// Axis-aligned rectangle on the integer grid, endpoints inclusive.
// Always stored normalized (x1 <= x2, y1 <= y2); the constructor reorders
// corners per axis, so callers may pass any opposite corner pair.
struct box {
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;
  std::int64_t x2 = 0;
  std::int64_t y2 = 0;

  box() = default;
  box(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by)
      : x1(ax < bx ? ax : bx),
        y1(ay < by ? ay : by),
        x2(ax < bx ? bx : ax),
        y2(ay < by ? by : ay) {}

  static box at(grid_point p) { return box(p.x, p.y, p.x, p.y); }

  std::int64_t width() const { return x2 - x1 + 1; }
  std::int64_t height() const { return y2 - y1 + 1; }

  bool contains(grid_point p) const {
    return x1 <= p.x && p.x <= x2 && y1 <= p.y && p.y <= y2;
  }

  auto operator<=>(const box&) const = default;
};

// Axis-aligned 3D box, normalized per axis like box.
struct box3 {
  std::int64_t x1 = 0, y1 = 0, z1 = 0;
  std::int64_t x2 = 0, y2 = 0, z2 = 0;

  box3() = default;
  box3(std::int64_t ax, std::int64_t ay, std::int64_t az, std::int64_t bx,
       std::int64_t by, std::int64_t bz)
      : x1(ax < bx ? ax : bx),
        y1(ay < by ? ay : by),
        z1(az < bz ? az : bz),
        x2(ax < bx ? bx : ax),
        y2(ay < by ? by : ay),
        z2(az < bz ? bz : az) {}

  auto operator<=>(const box3&) const = default;
};

enum class invariant_kind : std::uint8_t {
  conjunction,
  disjunction,
  negation,
  implication,
  constant_true,
  constant_false,
  time_point,
  time_interval,
  event_atom,
  owner_atom,
  occupy_point,
  occupy_box,
  occupy_3d_box,
  edge,
  transition,
};

// ── invariant ───────────────────────────────────────────────────────────────
// Immutable term tree with value semantics; copies share structure. All
// construction goes through the static factories, which normalize interval
// and box corner order.

class invariant {
 public:
  static invariant conjunction(invariant lhs, invariant rhs) {
    return binary(invariant_kind::conjunction, std::move(lhs), std::move(rhs));
  }
  static invariant disjunction(invariant lhs, invariant rhs) {
    return binary(invariant_kind::disjunction, std::move(lhs), std::move(rhs));
  }
  static invariant implication(invariant lhs, invariant rhs) {
    return binary(invariant_kind::implication, std::move(lhs), std::move(rhs));
  }
  static invariant negation(invariant term) {
    node n;
    n.kind = invariant_kind::negation;
    n.a = term.node_;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant constant(bool value) {
    node n;
    n.kind = value ? invariant_kind::constant_true : invariant_kind::constant_false;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant time_point(tick t) {
    node n;
    n.kind = invariant_kind::time_point;
    n.nums[0] = t;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant time_interval(tick t1, tick t2) {
    node n;
    n.kind = invariant_kind::time_interval;
    n.nums[0] = t1 < t2 ? t1 : t2;
    n.nums[1] = t1 < t2 ? t2 : t1;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant event_atom(std::string label) {
    return labeled(invariant_kind::event_atom, std::move(label));
  }
  static invariant owner_atom(std::string label) {
    return labeled(invariant_kind::owner_atom, std::move(label));
  }
  static invariant occupy_point(std::int64_t x, std::int64_t y) {
    node n;
    n.kind = invariant_kind::occupy_point;
    n.nums[0] = x;
    n.nums[1] = y;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant occupy_box(box b) {
    node n;
    n.kind = invariant_kind::occupy_box;
    n.nums = {b.x1, b.y1, b.x2, b.y2, 0, 0};
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant occupy_box(std::int64_t x1, std::int64_t y1, std::int64_t x2,
                              std::int64_t y2) {
    return occupy_box(box(x1, y1, x2, y2));
  }
  static invariant occupy_3d_box(box3 b) {
    node n;
    n.kind = invariant_kind::occupy_3d_box;
    n.nums = {b.x1, b.y1, b.z1, b.x2, b.y2, b.z2};
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant occupy_3d_box(std::int64_t x1, std::int64_t y1, std::int64_t z1,
                                 std::int64_t x2, std::int64_t y2, std::int64_t z2) {
    return occupy_3d_box(box3(x1, y1, z1, x2, y2, z2));
  }
  static invariant edge(std::string source, std::string target) {
    node n;
    n.kind = invariant_kind::edge;
    n.strs[0] = std::move(source);
    n.strs[1] = std::move(target);
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant transition(std::string source, std::string event, std::string target) {
    node n;
    n.kind = invariant_kind::transition;
    n.strs[0] = std::move(source);
    n.strs[1] = std::move(event);
    n.strs[2] = std::move(target);
    return invariant(std::make_shared<const node>(std::move(n)));
  }

  invariant_kind kind() const { return node_->kind; }

  bool is_connective() const {
    switch (kind()) {
      case invariant_kind::conjunction:
      case invariant_kind::disjunction:
      case invariant_kind::negation:
      case invariant_kind::implication:
        return true;
      default:
        return false;
    }
  }
  bool is_temporal_atom() const {
    return kind() == invariant_kind::time_point || kind() == invariant_kind::time_interval;
  }
  bool is_constant() const {
    return kind() == invariant_kind::constant_true ||
           kind() == invariant_kind::constant_false;
  }

  // Child access; valid only for the matching kinds.
  invariant lhs() const {
    assert(node_->a);
    return invariant(node_->a);
  }
  invariant rhs() const {
    assert(node_->b);
    return invariant(node_->b);
  }
  invariant child() const { return lhs(); }

  const std::string& label() const {
    assert(kind() == invariant_kind::event_atom || kind() == invariant_kind::owner_atom);
    return node_->strs[0];
  }
  tick at() const {
    assert(kind() == invariant_kind::time_point);
    return node_->nums[0];
  }
  tick from() const {
    assert(kind() == invariant_kind::time_interval);
    return node_->nums[0];
  }
  tick to() const {
    assert(kind() == invariant_kind::time_interval);
    return node_->nums[1];
  }
  grid_point point() const {
    assert(kind() == invariant_kind::occupy_point);
    return grid_point{node_->nums[0], node_->nums[1]};
  }
  box area() const {
    assert(kind() == invariant_kind::occupy_box);
    box b;
    b.x1 = node_->nums[0];
    b.y1 = node_->nums[1];
    b.x2 = node_->nums[2];
    b.y2 = node_->nums[3];
    return b;
  }
  box3 volume() const {
    assert(kind() == invariant_kind::occupy_3d_box);
    box3 b;
    b.x1 = node_->nums[0];
    b.y1 = node_->nums[1];
    b.z1 = node_->nums[2];
    b.x2 = node_->nums[3];
    b.y2 = node_->nums[4];
    b.z2 = node_->nums[5];
    return b;
  }
  const std::string& source() const {
    assert(kind() == invariant_kind::edge || kind() == invariant_kind::transition);
    return node_->strs[0];
  }
  const std::string& target() const {
    assert(kind() == invariant_kind::edge || kind() == invariant_kind::transition);
    return kind() == invariant_kind::edge ? node_->strs[1] : node_->strs[2];
  }
  const std::string& transition_event() const {
    assert(kind() == invariant_kind::transition);
    return node_->strs[1];
  }

  std::size_t node_count() const {
    std::size_t n = 1;
    if (node_->a) n += lhs().node_count();
    if (node_->b) n += rhs().node_count();
    return n;
  }

  bool operator==(const invariant& other) const {
    if (node_ == other.node_) return true;
    const node& x = *node_;
    const node& y = *other.node_;
    if (x.kind != y.kind || x.nums != y.nums || x.strs != y.strs) return false;
    if ((x.a == nullptr) != (y.a == nullptr)) return false;
    if ((x.b == nullptr) != (y.b == nullptr)) return false;
    if (x.a && !(lhs() == other.lhs())) return false;
    if (x.b && !(rhs() == other.rhs())) return false;
    return true;
  }

 private:
  struct node {
    invariant_kind kind{};
    std::shared_ptr<const node> a;
    std::shared_ptr<const node> b;
    std::array<std::int64_t, 6> nums{};
    std::array<std::string, 3> strs{};
  };

  explicit invariant(std::shared_ptr<const node> n) : node_(std::move(n)) {}

  static invariant binary(invariant_kind k, invariant lhs, invariant rhs) {
    node n;
    n.kind = k;
    n.a = lhs.node_;
    n.b = rhs.node_;
    return invariant(std::make_shared<const node>(std::move(n)));
  }
  static invariant labeled(invariant_kind k, std::string label) {
    node n;
    n.kind = k;
    n.strs[0] = std::move(label);
    return invariant(std::make_shared<const node>(std::move(n)));
  }

  std::shared_ptr<const node> node_;
};

// ── three-valued evaluation ─────────────────────────────────────────────────

enum class truth : std::uint8_t { no = 0, unknown = 1, yes = 2 };

inline truth truth_of(bool b) { return b ? truth::yes : truth::no; }

inline truth kleene_not(truth v) {
  if (v == truth::yes) return truth::no;
  if (v == truth::no) return truth::yes;
  return truth::unknown;
}
inline truth kleene_and(truth a, truth b) { return a < b ? a : b; }
inline truth kleene_or(truth a, truth b) { return a < b ? b : a; }
inline truth kleene_implies(truth a, truth b) { return kleene_or(kleene_not(a), b); }

// The evaluation environment for atoms. An absent point leaves spatial
// atoms indeterminate rather than false.
struct atom_context {
  tick time = 0;
  std::optional<grid_point> point;
  std::set<std::string> owners;
  std::set<std::string> events;
};

inline truth holds_at(const invariant& inv, const atom_context& ctx) {
  switch (inv.kind()) {
    case invariant_kind::conjunction:
      return kleene_and(holds_at(inv.lhs(), ctx), holds_at(inv.rhs(), ctx));
    case invariant_kind::disjunction:
      return kleene_or(holds_at(inv.lhs(), ctx), holds_at(inv.rhs(), ctx));
    case invariant_kind::implication:
      return kleene_implies(holds_at(inv.lhs(), ctx), holds_at(inv.rhs(), ctx));
    case invariant_kind::negation:
      return kleene_not(holds_at(inv.child(), ctx));
    case invariant_kind::constant_true:
      return truth::yes;
    case invariant_kind::constant_false:
      return truth::no;
    case invariant_kind::time_point:
      return truth_of(ctx.time == inv.at());
    case invariant_kind::time_interval:
      return truth_of(inv.from() <= ctx.time && ctx.time <= inv.to());
    case invariant_kind::owner_atom:
      return truth_of(ctx.owners.count(inv.label()) > 0);
    case invariant_kind::event_atom:
      return truth_of(ctx.events.count(inv.label()) > 0);
    case invariant_kind::occupy_point:
      if (!ctx.point) return truth::unknown;
      return truth_of(*ctx.point == inv.point());
    case invariant_kind::occupy_box:
      if (!ctx.point) return truth::unknown;
      return truth_of(inv.area().contains(*ctx.point));
    case invariant_kind::occupy_3d_box:
    case invariant_kind::edge:
    case invariant_kind::transition:
      // Graph and volumetric atoms have no pointwise truth here.
      return truth::unknown;
  }
  return truth::unknown;
}

// ── simplification ──────────────────────────────────────────────────────────
// Rewrites to a fixpoint using laws that are sound under the three-valued
// semantics and never grow the term: constant identity/absorption for
// AND/OR/IMPLIES, double-negation and negated-constant elimination, and
// collapse of idempotent AND/OR.

inline invariant simplify(const invariant& inv) {
  using k = invariant_kind;
  switch (inv.kind()) {
    case k::conjunction: {
      invariant a = simplify(inv.lhs());
      invariant b = simplify(inv.rhs());
      if (a.kind() == k::constant_false || b.kind() == k::constant_false)
        return invariant::constant(false);
      if (a.kind() == k::constant_true) return b;
      if (b.kind() == k::constant_true) return a;
      if (a == b) return a;
      return invariant::conjunction(std::move(a), std::move(b));
    }
    case k::disjunction: {
      invariant a = simplify(inv.lhs());
      invariant b = simplify(inv.rhs());
      if (a.kind() == k::constant_true || b.kind() == k::constant_true)
        return invariant::constant(true);
      if (a.kind() == k::constant_false) return b;
      if (b.kind() == k::constant_false) return a;
      if (a == b) return a;
      return invariant::disjunction(std::move(a), std::move(b));
    }
    case k::implication: {
      invariant a = simplify(inv.lhs());
      invariant b = simplify(inv.rhs());
      if (a.kind() == k::constant_false) return invariant::constant(true);
      if (b.kind() == k::constant_true) return invariant::constant(true);
      if (a.kind() == k::constant_true) return b;
      return invariant::implication(std::move(a), std::move(b));
    }
    case k::negation: {
      invariant c = simplify(inv.child());
      if (c.kind() == k::negation) return c.child();
      if (c.kind() == k::constant_true) return invariant::constant(false);
      if (c.kind() == k::constant_false) return invariant::constant(true);
      return invariant::negation(std::move(c));
    }
    default:
      return inv;
  }
}

// ── canonical printing ──────────────────────────────────────────────────────

namespace detail {

inline void append_quoted(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

inline void serialize_into(const invariant& inv, std::string& out) {
  using k = invariant_kind;
  auto num = [&out](std::int64_t v) { out += std::to_string(v); };
  switch (inv.kind()) {
    case k::conjunction:
    case k::disjunction:
    case k::implication: {
      out += inv.kind() == k::conjunction ? "AND("
             : inv.kind() == k::disjunction ? "OR("
                                            : "IMPLIES(";
      serialize_into(inv.lhs(), out);
      out.push_back(',');
      serialize_into(inv.rhs(), out);
      out.push_back(')');
      return;
    }
    case k::negation:
      out += "NOT(";
      serialize_into(inv.child(), out);
      out.push_back(')');
      return;
    case k::constant_true:
      out += "TRUE()";
      return;
    case k::constant_false:
      out += "FALSE()";
      return;
    case k::time_point:
      out += "TimePoint(";
      num(inv.at());
      out.push_back(')');
      return;
    case k::time_interval:
      out += "TimeInterval(";
      num(inv.from());
      out.push_back(',');
      num(inv.to());
      out.push_back(')');
      return;
    case k::event_atom:
      out += "Event(";
      append_quoted(out, inv.label());
      out.push_back(')');
      return;
    case k::owner_atom:
      out += "Owner(";
      append_quoted(out, inv.label());
      out.push_back(')');
      return;
    case k::occupy_point: {
      grid_point p = inv.point();
      out += "OccupyPoint(";
      num(p.x);
      out.push_back(',');
      num(p.y);
      out.push_back(')');
      return;
    }
    case k::occupy_box: {
      box b = inv.area();
      out += "OccupyBox(";
      num(b.x1);
      out.push_back(',');
      num(b.y1);
      out.push_back(',');
      num(b.x2);
      out.push_back(',');
      num(b.y2);
      out.push_back(')');
      return;
    }
    case k::occupy_3d_box: {
      box3 b = inv.volume();
      out += "Occupy3DBox(";
      num(b.x1);
      out.push_back(',');
      num(b.y1);
      out.push_back(',');
      num(b.z1);
      out.push_back(',');
      num(b.x2);
      out.push_back(',');
      num(b.y2);
      out.push_back(',');
      num(b.z2);
      out.push_back(')');
      return;
    }
    case k::edge:
      out += "Edge(";
      append_quoted(out, inv.source());
      out.push_back(',');
      append_quoted(out, inv.target());
      out.push_back(')');
      return;
    case k::transition:
      out += "Transition(";
      append_quoted(out, inv.source());
      out.push_back(',');
      append_quoted(out, inv.transition_event());
      out.push_back(',');
      append_quoted(out, inv.target());
      out.push_back(')');
      return;
  }
}

}  // namespace detail

inline std::string serialize_invariant(const invariant& inv) {
  std::string out;
  detail::serialize_into(inv, out);
  return out;
}

// ── parsing ─────────────────────────────────────────────────────────────────
// Grammar: term := Name '(' [arg {',' arg}] ')';  arg := term | integer |
// quoted string. Whitespace between tokens is insignificant. Constructor
// names are case-sensitive.

namespace detail {

class invariant_parser {
 public:
  explicit invariant_parser(std::string_view text) : text_(text) {}

  invariant parse_whole() {
    invariant t = parse_term();
    skip_ws();
    if (pos_ != text_.size()) throw syntax_error(pos_, "end of input");
    return t;
  }

 private:
  struct arg {
    // exactly one of these is engaged
    std::optional<invariant> term;
    std::optional<std::int64_t> number;
    std::optional<std::string> string;
  };

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
            text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) throw syntax_error(pos_, what);
    ++pos_;
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) throw syntax_error(pos_, "constructor name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t parse_number() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw syntax_error(pos_, "integer");
    auto v = text::to_int64(text_.substr(start, pos_ - start));
    if (!v) throw syntax_error(start, "integer in range");
    return *v;
  }

  std::string parse_string() {
    expect('"', "'\"'");
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= text_.size()) throw syntax_error(pos_, "escape character");
        char e = text_[++pos_];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: throw syntax_error(pos_, "valid escape");
        }
      } else {
        out.push_back(c);
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) throw syntax_error(pos_, "closing '\"'");
    ++pos_;
    return out;
  }

  arg parse_arg() {
    skip_ws();
    if (pos_ >= text_.size()) throw syntax_error(pos_, "argument");
    char c = text_[pos_];
    arg a;
    if (c == '"') {
      a.string = parse_string();
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      a.number = parse_number();
    } else {
      a.term = parse_term();
    }
    return a;
  }

  std::vector<arg> parse_args() {
    expect('(', "'('");
    std::vector<arg> args;
    if (peek_is(')')) {
      ++pos_;
      return args;
    }
    while (true) {
      args.push_back(parse_arg());
      skip_ws();
      if (pos_ >= text_.size()) throw syntax_error(pos_, "',' or ')'");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ')') {
        ++pos_;
        return args;
      }
      throw syntax_error(pos_, "',' or ')'");
    }
  }

  std::int64_t want_number(const std::string& name, const std::vector<arg>& args,
                           std::size_t i) {
    if (!args[i].number) throw syntax_error(pos_, "integer argument for " + name);
    return *args[i].number;
  }
  std::string want_string(const std::string& name, const std::vector<arg>& args,
                          std::size_t i) {
    if (!args[i].string) throw syntax_error(pos_, "string argument for " + name);
    return *args[i].string;
  }
  invariant want_term(const std::string& name, const std::vector<arg>& args,
                      std::size_t i) {
    if (!args[i].term) throw syntax_error(pos_, "term argument for " + name);
    return *args[i].term;
  }

  invariant parse_term() {
    std::size_t name_pos = pos_;
    std::string name = parse_name();
    std::vector<arg> args = parse_args();
    auto need = [&](std::size_t n) {
      if (args.size() != n) throw arity_error(name, n, args.size());
    };
    if (name == "AND") {
      need(2);
      return invariant::conjunction(want_term(name, args, 0), want_term(name, args, 1));
    }
    if (name == "OR") {
      need(2);
      return invariant::disjunction(want_term(name, args, 0), want_term(name, args, 1));
    }
    if (name == "IMPLIES") {
      need(2);
      return invariant::implication(want_term(name, args, 0), want_term(name, args, 1));
    }
    if (name == "NOT") {
      need(1);
      return invariant::negation(want_term(name, args, 0));
    }
    if (name == "TRUE") {
      need(0);
      return invariant::constant(true);
    }
    if (name == "FALSE") {
      need(0);
      return invariant::constant(false);
    }
    if (name == "TimePoint") {
      need(1);
      return invariant::time_point(want_number(name, args, 0));
    }
    if (name == "TimeInterval") {
      need(2);
      return invariant::time_interval(want_number(name, args, 0), want_number(name, args, 1));
    }
    if (name == "Event") {
      need(1);
      return invariant::event_atom(want_string(name, args, 0));
    }
    if (name == "Owner") {
      need(1);
      return invariant::owner_atom(want_string(name, args, 0));
    }
    if (name == "OccupyPoint") {
      need(2);
      return invariant::occupy_point(want_number(name, args, 0), want_number(name, args, 1));
    }
    if (name == "OccupyBox") {
      need(4);
      return invariant::occupy_box(want_number(name, args, 0), want_number(name, args, 1),
                                   want_number(name, args, 2), want_number(name, args, 3));
    }
    if (name == "Occupy3DBox") {
      need(6);
      return invariant::occupy_3d_box(want_number(name, args, 0), want_number(name, args, 1),
                                      want_number(name, args, 2), want_number(name, args, 3),
                                      want_number(name, args, 4), want_number(name, args, 5));
    }
    if (name == "Edge") {
      need(2);
      return invariant::edge(want_string(name, args, 0), want_string(name, args, 1));
    }
    if (name == "Transition") {
      need(3);
      return invariant::transition(want_string(name, args, 0), want_string(name, args, 1),
                                   want_string(name, args, 2));
    }
    throw syntax_error(name_pos, "known constructor name");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline invariant parse_invariant(std::string_view text) {
  return detail::invariant_parser(text).parse_whole();
}

}  // namespace engine

#endif  // ENGINE_INVARIANT_HPP
