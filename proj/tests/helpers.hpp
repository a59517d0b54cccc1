#ifndef ENGINE_TESTS_HELPERS_HPP
#define ENGINE_TESTS_HELPERS_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "engine/invariant.hpp"

// Deterministic generators and a reference evaluator used as the oracle for
// the term-level property tests.

namespace testgen {

inline const std::vector<std::string>& label_pool() {
  static const std::vector<std::string> pool{
      "A", "B", "cloud", "substation", "he said \"hi\"", "back\\slash", "two\nlines", "tab\there",
  };
  return pool;
}

inline std::string random_label(std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, label_pool().size() - 1);
  return label_pool()[pick(rng)];
}

inline std::int64_t random_small(std::mt19937& rng, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  return d(rng);
}

inline engine::invariant random_leaf(std::mt19937& rng) {
  switch (random_small(rng, 0, 10)) {
    case 0: return engine::invariant::constant(true);
    case 1: return engine::invariant::constant(false);
    case 2: return engine::invariant::time_point(random_small(rng, -5, 15));
    case 3: {
      auto a = random_small(rng, -5, 15);
      auto b = random_small(rng, -5, 15);
      return engine::invariant::time_interval(a, b);
    }
    case 4: return engine::invariant::event_atom(random_label(rng));
    case 5: return engine::invariant::owner_atom(random_label(rng));
    case 6:
      return engine::invariant::occupy_point(random_small(rng, -10, 10),
                                             random_small(rng, -10, 10));
    case 7:
      return engine::invariant::occupy_box(random_small(rng, -10, 10), random_small(rng, -10, 10),
                                           random_small(rng, -10, 10), random_small(rng, -10, 10));
    case 8:
      return engine::invariant::occupy_3d_box(
          random_small(rng, -10, 10), random_small(rng, -10, 10), random_small(rng, -10, 10),
          random_small(rng, -10, 10), random_small(rng, -10, 10), random_small(rng, -10, 10));
    case 9: return engine::invariant::edge(random_label(rng), random_label(rng));
    default:
      return engine::invariant::transition(random_label(rng), random_label(rng),
                                           random_label(rng));
  }
}

inline engine::invariant random_invariant(std::mt19937& rng, int max_depth) {
  if (max_depth <= 0 || random_small(rng, 0, 2) == 0) return random_leaf(rng);
  switch (random_small(rng, 0, 3)) {
    case 0:
      return engine::invariant::conjunction(random_invariant(rng, max_depth - 1),
                                            random_invariant(rng, max_depth - 1));
    case 1:
      return engine::invariant::disjunction(random_invariant(rng, max_depth - 1),
                                            random_invariant(rng, max_depth - 1));
    case 2:
      return engine::invariant::implication(random_invariant(rng, max_depth - 1),
                                            random_invariant(rng, max_depth - 1));
    default:
      return engine::invariant::negation(random_invariant(rng, max_depth - 1));
  }
}

inline engine::atom_context random_context(std::mt19937& rng, bool with_point) {
  engine::atom_context ctx;
  ctx.time = random_small(rng, -5, 15);
  if (with_point) {
    ctx.point = engine::grid_point{random_small(rng, -10, 10), random_small(rng, -10, 10)};
  }
  for (const std::string& label : label_pool()) {
    if (random_small(rng, 0, 1)) ctx.owners.insert(label);
    if (random_small(rng, 0, 1)) ctx.events.insert(label);
  }
  return ctx;
}

// Independent reference evaluator: three-valued truth as optional<bool>,
// written by direct case analysis rather than min/max ordering.
inline std::optional<bool> ref_eval(const engine::invariant& inv,
                                    const engine::atom_context& ctx) {
  using k = engine::invariant_kind;
  switch (inv.kind()) {
    case k::constant_true: return true;
    case k::constant_false: return false;
    case k::negation: {
      auto v = ref_eval(inv.child(), ctx);
      if (!v) return std::nullopt;
      return !*v;
    }
    case k::conjunction: {
      auto a = ref_eval(inv.lhs(), ctx);
      auto b = ref_eval(inv.rhs(), ctx);
      if (a.has_value() && !*a) return false;
      if (b.has_value() && !*b) return false;
      if (a.has_value() && b.has_value()) return true;
      return std::nullopt;
    }
    case k::disjunction: {
      auto a = ref_eval(inv.lhs(), ctx);
      auto b = ref_eval(inv.rhs(), ctx);
      if (a.has_value() && *a) return true;
      if (b.has_value() && *b) return true;
      if (a.has_value() && b.has_value()) return false;
      return std::nullopt;
    }
    case k::implication: {
      auto a = ref_eval(inv.lhs(), ctx);
      auto b = ref_eval(inv.rhs(), ctx);
      if (a.has_value() && !*a) return true;
      if (b.has_value() && *b) return true;
      if (a.has_value() && b.has_value()) return false;  // a true, b false
      return std::nullopt;
    }
    case k::time_point: return ctx.time == inv.at();
    case k::time_interval: return inv.from() <= ctx.time && ctx.time <= inv.to();
    case k::owner_atom: return ctx.owners.count(inv.label()) > 0;
    case k::event_atom: return ctx.events.count(inv.label()) > 0;
    case k::occupy_point: {
      if (!ctx.point) return std::nullopt;
      return *ctx.point == inv.point();
    }
    case k::occupy_box: {
      if (!ctx.point) return std::nullopt;
      const engine::box b = inv.area();
      return b.x1 <= ctx.point->x && ctx.point->x <= b.x2 && b.y1 <= ctx.point->y &&
             ctx.point->y <= b.y2;
    }
    case k::occupy_3d_box:
    case k::edge:
    case k::transition: return std::nullopt;
  }
  return std::nullopt;
}

inline engine::truth to_truth(std::optional<bool> v) {
  if (!v) return engine::truth::unknown;
  return *v ? engine::truth::yes : engine::truth::no;
}

}  // namespace testgen

#endif  // ENGINE_TESTS_HELPERS_HPP
