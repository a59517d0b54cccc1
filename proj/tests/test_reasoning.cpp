#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "engine/reasoning.hpp"
#include "helpers.hpp"

using namespace engine;

namespace {

const char* kWorkedFormula =
    "IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner(\"A\")),"
    "OccupyBox(143,4056,1536,2612))";

box random_box(std::mt19937& rng, std::int64_t span, std::int64_t max_side) {
  std::int64_t x = testgen::random_small(rng, -span, span);
  std::int64_t y = testgen::random_small(rng, -span, span);
  std::int64_t w = testgen::random_small(rng, 0, max_side - 1);
  std::int64_t h = testgen::random_small(rng, 0, max_side - 1);
  return box(x, y, x + w, y + h);
}

}  // namespace

TEST_CASE("filter_by_time substitutes temporal atoms and simplifies", "[reasoning][filter]") {
  invariant inv = parse_invariant(kWorkedFormula);

  invariant at900 = filter_by_time(inv, 900);
  REQUIRE(serialize_invariant(at900) == "IMPLIES(Owner(\"A\"),OccupyBox(143,2612,1536,4056))");

  invariant at975 = filter_by_time(inv, 975);
  REQUIRE(at975 == invariant::constant(true));

  REQUIRE(filter_by_time(invariant::time_interval(0, 10), 5) == invariant::constant(true));
  REQUIRE(filter_by_time(invariant::time_point(7), 7) == invariant::constant(true));
  REQUIRE(filter_by_time(invariant::time_point(7), 8) == invariant::constant(false));
}

TEST_CASE("filter_by_owner eliminates owner atoms", "[reasoning][filter]") {
  invariant inv = filter_by_time(parse_invariant(kWorkedFormula), 900);

  invariant as_a = filter_by_owner(inv, "A");
  REQUIRE(serialize_invariant(as_a) == "OccupyBox(143,2612,1536,4056)");

  invariant as_b = filter_by_owner(inv, "B");
  REQUIRE(as_b == invariant::constant(true));

  REQUIRE(filter_by_owner(invariant::owner_atom("X"), "X") == invariant::constant(true));

  SECTION("temporal atoms left in the term violate the precondition") {
    REQUIRE_THROWS_AS(filter_by_owner(parse_invariant(kWorkedFormula), "A"),
                      precondition_error);
  }
}

TEST_CASE("filters are sound for matching contexts", "[reasoning][filter][property]") {
  std::mt19937 rng(2718);
  for (int i = 0; i < 300; ++i) {
    invariant inv = testgen::random_invariant(rng, 5);
    tick t = testgen::random_small(rng, -5, 15);
    invariant timed = filter_by_time(inv, t);
    REQUIRE_FALSE(detail::contains_temporal_atom(timed));
    for (int j = 0; j < 10; ++j) {
      atom_context ctx = testgen::random_context(rng, j % 2 == 0);
      ctx.time = t;
      REQUIRE(holds_at(timed, ctx) == holds_at(inv, ctx));
    }
    std::string label = testgen::random_label(rng);
    invariant owned = filter_by_owner(timed, label);
    for (int j = 0; j < 10; ++j) {
      atom_context ctx = testgen::random_context(rng, j % 2 == 0);
      ctx.time = t;
      ctx.owners = {label};
      REQUIRE(holds_at(owned, ctx) == holds_at(inv, ctx));
    }
  }
}

TEST_CASE("extract_snapshot reads the positive fragment", "[reasoning][snapshot]") {
  invariant paper = parse_invariant(kWorkedFormula);

  SECTION("active interval contributes the owner's box") {
    spatial_snapshot snap = extract_snapshot({paper}, 1020);
    REQUIRE(snap.time == 1020);
    REQUIRE(snap.owned_boxes ==
            std::vector<owned_box>{{"A", box(143, 2612, 1536, 4056)}});
  }
  SECTION("no interval active means empty snapshot") {
    spatial_snapshot snap = extract_snapshot({paper}, 975);
    REQUIRE(snap.owned_boxes.empty());
  }
  SECTION("extraction composes with the filter pipeline") {
    invariant residual = filter_by_owner(filter_by_time(paper, 1020), "A");
    REQUIRE(residual.kind() == invariant_kind::occupy_box);
    spatial_snapshot snap = extract_snapshot({paper}, 1020);
    REQUIRE(snap.owned_boxes[0].area == residual.area());
  }
  SECTION("negative fragment is rejected loudly") {
    try {
      extract_snapshot({invariant::negation(invariant::owner_atom("A"))}, 0);
      FAIL("expected unsupported_form");
    } catch (const unsupported_form& e) {
      REQUIRE(e.term_index() == 0);
    }
  }
  SECTION("the offending term's index is reported") {
    std::vector<invariant> model{paper, invariant::event_atom("boom")};
    try {
      extract_snapshot(model, 900);
      FAIL("expected unsupported_form");
    } catch (const unsupported_form& e) {
      REQUIRE(e.term_index() == 1);
    }
  }
  SECTION("conjunction of implications, points as degenerate boxes, canonical order") {
    invariant two = invariant::conjunction(
        invariant::implication(
            invariant::conjunction(invariant::time_interval(0, 10),
                                   invariant::owner_atom("b")),
            invariant::occupy_point(3, 4)),
        invariant::implication(
            invariant::conjunction(invariant::owner_atom("a"),
                                   invariant::time_interval(0, 10)),
            invariant::occupy_box(0, 0, 2, 2)));
    spatial_snapshot snap = extract_snapshot({two}, 5);
    REQUIRE(snap.owned_boxes ==
            std::vector<owned_box>{{"a", box(0, 0, 2, 2)}, {"b", box(3, 4, 3, 4)}});
  }
  SECTION("bare owner guard is always active") {
    invariant bare = invariant::implication(invariant::owner_atom("m"),
                                            invariant::occupy_box(1, 1, 2, 2));
    REQUIRE(extract_snapshot({bare}, 12345).owned_boxes.size() == 1);
  }
  SECTION("TRUE() terms contribute nothing") {
    REQUIRE(extract_snapshot({invariant::constant(true)}, 0).owned_boxes.empty());
  }
}

TEST_CASE("decompose_to_points enumerates the lattice", "[reasoning][geometry]") {
  REQUIRE(decompose_to_points(box(0, 0, 1, 1)) ==
          point_set{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  REQUIRE(decompose_to_points(box(3, 3, 3, 3)) == point_set{{3, 3}});

  SECTION("cardinality matches the closed form, by explicit enumeration") {
    box b(0, 0, 99, 49);
    point_set points = decompose_to_points(b);
    REQUIRE(points.size() == 5000);
    REQUIRE(static_cast<std::int64_t>(points.size()) == b.width() * b.height());
    std::size_t enumerated = 0;
    for (std::int64_t x = 0; x <= 99; ++x)
      for (std::int64_t y = 0; y <= 49; ++y)
        enumerated += points.count(grid_point{x, y});
    REQUIRE(enumerated == 5000);
  }
  SECTION("the cap is an explicit error, not truncation") {
    try {
      decompose_to_points(box(0, 0, 999, 999), 1000);
      FAIL("expected cap_exceeded");
    } catch (const cap_exceeded& e) {
      REQUIRE(e.required_count() == 1'000'000);
    }
  }
}

TEST_CASE("boxes_overlap uses inclusive bounds", "[reasoning][geometry]") {
  REQUIRE(boxes_overlap(box(0, 0, 10, 10), box(10, 10, 20, 20)));  // shared corner
  REQUIRE_FALSE(boxes_overlap(box(0, 0, 5, 5), box(6, 0, 9, 5)));
  REQUIRE(boxes_overlap(box(2, 2, 4, 4), box(0, 0, 10, 10)));  // containment
}

TEST_CASE("boxes_overlap agrees with the point-set oracle", "[reasoning][geometry][property]") {
  std::mt19937 rng(31337);
  for (int i = 0; i < 1000; ++i) {
    box a = random_box(rng, 30, 12);
    box b = random_box(rng, 30, 12);
    point_set pa = decompose_to_points(a);
    point_set pb = decompose_to_points(b);
    bool shared = false;
    for (const grid_point& p : pa) {
      if (pb.count(p)) {
        shared = true;
        break;
      }
    }
    REQUIRE(boxes_overlap(a, b) == shared);
    REQUIRE(boxes_overlap(b, a) == boxes_overlap(a, b));
    REQUIRE(boxes_overlap(a, a));
  }
}

TEST_CASE("coverage counts lattice points exactly", "[reasoning][coverage]") {
  spatial_snapshot snap;
  snap.time = 0;
  snap.owned_boxes = {{"cloud", box(0, 0, 4, 9)}};
  REQUIRE(coverage(snap, "cloud", box(0, 0, 9, 9)) == 0.5);

  SECTION("empty snapshot covers nothing") {
    REQUIRE(coverage(spatial_snapshot{}, "cloud", box(0, 0, 3, 3)) == 0.0);
  }
  SECTION("a box covers itself fully") {
    REQUIRE(coverage(snap, "cloud", box(0, 0, 4, 9)) == 1.0);
  }
  SECTION("other owners do not count") {
    REQUIRE(coverage(snap, "smoke", box(0, 0, 9, 9)) == 0.0);
  }
  SECTION("overlapping boxes are not double-counted") {
    snap.owned_boxes.push_back({"cloud", box(0, 0, 4, 9)});
    snap.owned_boxes.push_back({"cloud", box(2, 0, 6, 9)});
    REQUIRE(covered_point_count(snap, "cloud", box(0, 0, 9, 9)) == 70);
  }
}

TEST_CASE("coverage equals brute-force lattice counting", "[reasoning][coverage][property]") {
  std::mt19937 rng(5050);
  for (int i = 0; i < 200; ++i) {
    spatial_snapshot snap;
    snap.time = 0;
    const int n_boxes = static_cast<int>(testgen::random_small(rng, 0, 10));
    for (int j = 0; j < n_boxes; ++j) {
      snap.owned_boxes.push_back(
          {testgen::random_small(rng, 0, 1) ? "cloud" : "smoke", random_box(rng, 20, 10)});
    }
    box area = random_box(rng, 20, 8);

    std::int64_t brute = 0;
    for (const grid_point& p : decompose_to_points(area)) {
      for (const owned_box& ob : snap.owned_boxes) {
        if (ob.owner == "cloud" && ob.area.contains(p)) {
          brute += 1;
          break;
        }
      }
    }
    REQUIRE(covered_point_count(snap, "cloud", area) == brute);
    REQUIRE(coverage(snap, "cloud", area) ==
            static_cast<double>(brute) / static_cast<double>(area.width() * area.height()));

    // Monotone: adding a box never decreases coverage.
    spatial_snapshot more = snap;
    more.owned_boxes.push_back({"cloud", random_box(rng, 20, 10)});
    REQUIRE(coverage(more, "cloud", area) >= coverage(snap, "cloud", area));

    // Union semantics: duplicating boxes changes nothing.
    spatial_snapshot dup = snap;
    dup.owned_boxes.insert(dup.owned_boxes.end(), snap.owned_boxes.begin(),
                           snap.owned_boxes.end());
    REQUIRE(coverage(dup, "cloud", area) == coverage(snap, "cloud", area));
  }
}
