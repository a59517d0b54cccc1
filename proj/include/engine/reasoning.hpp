#ifndef ENGINE_REASONING_HPP
#define ENGINE_REASONING_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "engine/errors.hpp"
#include "engine/invariant.hpp"

// Analysis over invariant terms: time/owner filtering, snapshot extraction
// from the positive model fragment, decomposition of areas to lattice
// points, overlap tests, and exact coverage measurement.

namespace engine {

using point_set = std::set<grid_point>;

struct owned_box {
  std::string owner;
  box area;
  auto operator<=>(const owned_box&) const = default;
};

// The (owner, box) facts active at one tick. owned_boxes is kept in
// canonical order: owner ascending, then corner order.
struct spatial_snapshot {
  tick time = 0;
  std::vector<owned_box> owned_boxes;

  bool operator==(const spatial_snapshot&) const = default;
};

// ── filtering ───────────────────────────────────────────────────────────────

namespace detail {

template <typename Substitute>
invariant rewrite_atoms(const invariant& inv, Substitute&& subst) {
  using k = invariant_kind;
  switch (inv.kind()) {
    case k::conjunction:
      return invariant::conjunction(rewrite_atoms(inv.lhs(), subst),
                                    rewrite_atoms(inv.rhs(), subst));
    case k::disjunction:
      return invariant::disjunction(rewrite_atoms(inv.lhs(), subst),
                                    rewrite_atoms(inv.rhs(), subst));
    case k::implication:
      return invariant::implication(rewrite_atoms(inv.lhs(), subst),
                                    rewrite_atoms(inv.rhs(), subst));
    case k::negation:
      return invariant::negation(rewrite_atoms(inv.child(), subst));
    default:
      return subst(inv);
  }
}

inline bool contains_temporal_atom(const invariant& inv) {
  if (inv.is_temporal_atom()) return true;
  if (inv.is_connective()) {
    if (contains_temporal_atom(inv.lhs())) return true;
    if (inv.kind() != invariant_kind::negation && contains_temporal_atom(inv.rhs()))
      return true;
  }
  return false;
}

}  // namespace detail

// Replaces every temporal atom by its truth value at t, then simplifies.
// The result contains no TimePoint/TimeInterval atoms.
inline invariant filter_by_time(const invariant& inv, tick t) {
  invariant substituted = detail::rewrite_atoms(inv, [t](const invariant& atom) {
    if (atom.kind() == invariant_kind::time_point)
      return invariant::constant(atom.at() == t);
    if (atom.kind() == invariant_kind::time_interval)
      return invariant::constant(atom.from() <= t && t <= atom.to());
    return atom;
  });
  return simplify(substituted);
}

// Replaces every owner atom by label equality, then simplifies. The input
// must already be time-filtered.
inline invariant filter_by_owner(const invariant& inv, const std::string& label) {
  if (detail::contains_temporal_atom(inv)) {
    throw precondition_error("filter_by_owner: term still contains temporal atoms");
  }
  invariant substituted = detail::rewrite_atoms(inv, [&label](const invariant& atom) {
    if (atom.kind() == invariant_kind::owner_atom)
      return invariant::constant(atom.label() == label);
    return atom;
  });
  return simplify(substituted);
}

// ── snapshot extraction ─────────────────────────────────────────────────────
// Supported model fragment: a term is TRUE(), an implication
// IMPLIES(guard, spatial), or a conjunction of supported terms. The guard is
// Owner(l) or a conjunction of Owner(l) with a temporal formula (AND/OR over
// TimePoint/TimeInterval/TRUE/FALSE). The consequent is OccupyBox or
// OccupyPoint. Anything else raises unsupported_form with the term's index.

namespace detail {

inline bool is_temporal_formula(const invariant& inv) {
  using k = invariant_kind;
  switch (inv.kind()) {
    case k::time_point:
    case k::time_interval:
    case k::constant_true:
    case k::constant_false:
      return true;
    case k::conjunction:
    case k::disjunction:
      return is_temporal_formula(inv.lhs()) && is_temporal_formula(inv.rhs());
    default:
      return false;
  }
}

struct guard_parts {
  std::string owner;
  invariant temporal;
};

inline bool split_guard(const invariant& guard, guard_parts& out) {
  using k = invariant_kind;
  if (guard.kind() == k::owner_atom) {
    out.owner = guard.label();
    out.temporal = invariant::constant(true);
    return true;
  }
  if (guard.kind() == k::conjunction) {
    invariant a = guard.lhs();
    invariant b = guard.rhs();
    if (a.kind() == k::owner_atom && is_temporal_formula(b)) {
      out.owner = a.label();
      out.temporal = b;
      return true;
    }
    if (b.kind() == k::owner_atom && is_temporal_formula(a)) {
      out.owner = b.label();
      out.temporal = a;
      return true;
    }
  }
  return false;
}

inline void extract_term(const invariant& term, std::size_t index, tick t,
                         std::vector<owned_box>& out) {
  using k = invariant_kind;
  if (term.kind() == k::constant_true) return;
  if (term.kind() == k::conjunction) {
    extract_term(term.lhs(), index, t, out);
    extract_term(term.rhs(), index, t, out);
    return;
  }
  if (term.kind() != k::implication) {
    throw unsupported_form(index, "expected IMPLIES or AND of IMPLIES");
  }
  guard_parts guard{.owner = {}, .temporal = invariant::constant(true)};
  if (!split_guard(term.lhs(), guard)) {
    throw unsupported_form(index, "guard must conjoin Owner with a temporal formula");
  }
  invariant spatial = term.rhs();
  box area;
  if (spatial.kind() == k::occupy_box) {
    area = spatial.area();
  } else if (spatial.kind() == k::occupy_point) {
    area = box::at(spatial.point());
  } else {
    throw unsupported_form(index, "consequent must be OccupyBox or OccupyPoint");
  }
  atom_context ctx;
  ctx.time = t;
  if (holds_at(guard.temporal, ctx) == truth::yes) {
    out.push_back(owned_box{guard.owner, area});
  }
}

}  // namespace detail

inline spatial_snapshot extract_snapshot(const std::vector<invariant>& model, tick t) {
  spatial_snapshot snap;
  snap.time = t;
  for (std::size_t i = 0; i < model.size(); ++i) {
    detail::extract_term(model[i], i, t, snap.owned_boxes);
  }
  std::sort(snap.owned_boxes.begin(), snap.owned_boxes.end());
  return snap;
}

// ── geometry ────────────────────────────────────────────────────────────────

inline constexpr std::int64_t default_decomposition_cap = 10'000'000;

// All lattice points of the box. Boxes larger than the cap raise
// cap_exceeded; coverage() is the scalable alternative.
inline point_set decompose_to_points(const box& b,
                                     std::int64_t cap = default_decomposition_cap) {
  const std::int64_t w = b.width();
  const std::int64_t h = b.height();
  if (w > cap || h > cap || w > cap / h) {
    // Saturate on overflow; the exact count is unrepresentable anyway.
    std::int64_t required =
        (w != 0 && h > std::numeric_limits<std::int64_t>::max() / w)
            ? std::numeric_limits<std::int64_t>::max()
            : w * h;
    throw cap_exceeded(required);
  }
  point_set points;
  for (std::int64_t x = b.x1; x <= b.x2; ++x) {
    for (std::int64_t y = b.y1; y <= b.y2; ++y) {
      points.insert(grid_point{x, y});
    }
  }
  return points;
}

// Inclusive-bound rectangle intersection: touching edges overlap.
inline bool boxes_overlap(const box& a, const box& b) {
  return a.x1 <= b.x2 && b.x1 <= a.x2 && a.y1 <= b.y2 && b.y1 <= a.y2;
}

namespace detail {

// Union size of half-open integer intervals, given as (start, end) pairs.
inline std::int64_t interval_union_length(std::vector<std::pair<std::int64_t, std::int64_t>>& iv) {
  std::sort(iv.begin(), iv.end());
  std::int64_t total = 0;
  std::int64_t cur_start = 0;
  std::int64_t cur_end = 0;
  bool open = false;
  for (const auto& [s, e] : iv) {
    if (!open) {
      cur_start = s;
      cur_end = e;
      open = true;
    } else if (s <= cur_end) {
      cur_end = std::max(cur_end, e);
    } else {
      total += cur_end - cur_start;
      cur_start = s;
      cur_end = e;
    }
  }
  if (open) total += cur_end - cur_start;
  return total;
}

}  // namespace detail

// Number of lattice points of `area` covered by at least one box of the
// snapshot with the given owner. Exact; overlapping boxes count once.
inline std::int64_t covered_point_count(const spatial_snapshot& snapshot,
                                        const std::string& owner_label, const box& area) {
  // Clip matching boxes to the area.
  std::vector<box> clipped;
  for (const owned_box& ob : snapshot.owned_boxes) {
    if (ob.owner != owner_label) continue;
    if (!boxes_overlap(ob.area, area)) continue;
    box c;
    c.x1 = std::max(ob.area.x1, area.x1);
    c.y1 = std::max(ob.area.y1, area.y1);
    c.x2 = std::min(ob.area.x2, area.x2);
    c.y2 = std::min(ob.area.y2, area.y2);
    clipped.push_back(c);
  }
  if (clipped.empty()) return 0;

  // Sweep over x-slabs delimited by box edges; within a slab the union of
  // y-intervals is constant.
  std::vector<std::int64_t> xs;
  xs.reserve(clipped.size() * 2);
  for (const box& c : clipped) {
    xs.push_back(c.x1);
    xs.push_back(c.x2 + 1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::int64_t total = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> ys;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const std::int64_t slab_lo = xs[i];
    const std::int64_t slab_hi = xs[i + 1];
    ys.clear();
    for (const box& c : clipped) {
      if (c.x1 <= slab_lo && c.x2 + 1 >= slab_hi) {
        ys.emplace_back(c.y1, c.y2 + 1);
      }
    }
    total += (slab_hi - slab_lo) * detail::interval_union_length(ys);
  }
  return total;
}

// Fraction of the area's lattice points covered by the owner's boxes.
inline double coverage(const spatial_snapshot& snapshot, const std::string& owner_label,
                       const box& area) {
  const std::int64_t covered = covered_point_count(snapshot, owner_label, area);
  const std::int64_t total = area.width() * area.height();
  return static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace engine

#endif  // ENGINE_REASONING_HPP
