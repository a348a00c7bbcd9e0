#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "crossenv/error.hpp"
#include "crossenv/fixtures.hpp"
#include "crossenv/geometry.hpp"
#include "crossenv/json_io.hpp"

using namespace crossenv;
using crossenv::test::brute_distance;
using crossenv::test::winding_number;

namespace {

Curve square(bool ccw = true) {
  std::vector<Point> v{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  if (!ccw) std::reverse(v.begin(), v.end());
  return Curve(v, true);
}

}  // namespace

TEST_CASE("curve parametrisation by arc length") {
  const Curve sq = square();
  CHECK(sq.length() == doctest::Approx(8.0));
  CHECK(sq.point_at(1.0) == Point(0, 1));
  CHECK(sq.point_at(9.0) == Point(0, 1));  // wraps
  CHECK(sq.signed_area() == doctest::Approx(4.0));
  CHECK(square(false).signed_area() == doctest::Approx(-4.0));
  const auto part = sq.sample(7.0, 9.0);  // across the seam
  REQUIRE(part.size() == 3);
  CHECK(part.front() == Point(1, 0));
  CHECK(part[1] == Point(1, 1));
  CHECK(part.back() == Point(0, 1));

  const Curve open({{0, 0}, {1, 0}, {1, 1}}, false);
  CHECK(open.point_at(5.0) == Point(1, 1));  // clamps
  CHECK(open.reversed().point_at(0.0) == Point(1, 1));
  CHECK(open.signed_area() == 0.0);
}

TEST_CASE("curve construction rejects degenerate input") {
  CHECK_THROWS_AS(Curve({{0, 0}, {0, 0}, {1, 0}}, false), Error);
  CHECK_THROWS_AS(Curve({{0, 0}}, false), Error);
  const Curve bowtie({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true);
  CHECK_FALSE(bowtie.is_simple());
  CHECK(square().is_simple());
}

TEST_CASE("point in polygon agrees with the winding number") {
  // Star-shaped 40-gon with a ragged radius.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.5, 1.5), u(-2.0, 2.0);
  std::vector<Point> star;
  for (int i = 0; i < 40; ++i) star.push_back(std::polar(r(rng), 2.0 * std::numbers::pi * i / 40));
  for (int n = 0; n < 4000; ++n) {
    const Point p(u(rng), u(rng));
    CHECK(point_in_polygon(p, star) == (winding_number(p, star) != 0));
  }
}

TEST_CASE("segment index nearest matches brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<SegmentIndex::Entry> entries;
  std::vector<std::pair<Point, Point>> segs;
  for (std::uint32_t i = 0; i < 300; ++i) {
    const Point a(u(rng), u(rng));
    const Point b = a + 0.2 * Point(u(rng), u(rng));
    entries.push_back({a, b, i % 7, i});
    segs.emplace_back(a, b);
  }
  const SegmentIndex index(entries);
  for (int n = 0; n < 500; ++n) {
    const Point p(u(rng), u(rng));
    const double d = brute_distance(p, segs);
    CHECK(index.distance(p) == doctest::Approx(d).epsilon(1e-12));
    CHECK(index.nearest(p).distance == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("domain validation") {
  CHECK_NOTHROW(PlanarDomain(square()));
  CHECK_THROWS_AS(PlanarDomain(square(false)), Error);
  // slit touching the outer curve
  CHECK_THROWS_AS(PlanarDomain(square(), {}, {Curve({{0, 0}, {1, 0}}, false)}), Error);
  // hole outside
  CHECK_THROWS_AS(PlanarDomain(square(), {Curve(circle_vertices({5, 0}, 0.5, 8), true)}), Error);
  try {
    PlanarDomain(square(false));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_domain);
  }
}

TEST_CASE("Example 1 domain") {
  const PlanarDomain d = fixtures::example1();
  CHECK(d.area() == doctest::Approx(4.0));
  CHECK(d.min_slit_clearance() == doctest::Approx(0.5));
  CHECK(d.contains({0.3, 0.2}));
  CHECK_FALSE(d.contains({0.3, 0.0}));  // on the slit
  CHECK_FALSE(d.contains({1.5, 0.0}));
  // Every point of the outer square is of type 1, slit points of type 2.
  for (double x : {-0.9, -0.3, 0.0, 0.6}) {
    CHECK(classify_point(d, {x, 1.0}, 1e-9) == PointType::type1);
    CHECK(classify_point(d, {1.0, x}, 1e-9) == PointType::type1);
  }
  for (double x : {-0.4, 0.0, 0.2}) CHECK(classify_point(d, {x, 0.0}, 1e-9) == PointType::type2);
  CHECK(classify_point(d, {0.2, 0.3}, 1e-9) == PointType::not_boundary);
  CHECK_THROWS_AS(classify_point(d, {0.5, 0.0}, 1e-9), Error);
}

TEST_CASE("nearest boundary reports the slit face") {
  const PlanarDomain d = fixtures::example1();
  const auto up = nearest_boundary(d, {0.1, 0.05});
  CHECK(up.curve.kind == CurveKind::slit);
  CHECK(up.side == Side::plus);
  CHECK(up.t == doctest::Approx(0.6));
  CHECK(nearest_boundary(d, {0.1, -0.05}).side == Side::minus);
  const auto outer = nearest_boundary(d, {0.1, 0.9});
  CHECK(outer.curve.kind == CurveKind::outer);
  CHECK(outer.distance == doctest::Approx(0.1));
}

TEST_CASE("boundary set validation and length") {
  const PlanarDomain d = fixtures::example1();
  const BoundarySet both{{fixtures::slit_arc(-0.25, 0.25, Side::both)}};
  CHECK_NOTHROW(validate(d, both));
  CHECK(arc_length(both) == doctest::Approx(1.0));  // two faces
  CHECK(arc_length(BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::plus)}}) == doctest::Approx(0.5));
  // overlapping faces
  CHECK_THROWS_AS(validate(d, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::both),
                                           fixtures::slit_arc(0.0, 0.4, Side::plus)}}),
                  Error);
  // faces only on slits
  CHECK_THROWS_AS(validate(d, BoundarySet{{BoundaryArc{{CurveKind::outer, 0}, 0.0, 1.0, Side::plus}}}), Error);
  CHECK_THROWS_AS(validate(d, BoundarySet{{BoundaryArc{{CurveKind::hole, 0}, 0.0, 1.0, Side::both}}}), Error);
  CHECK_THROWS_AS(validate(d, BoundarySet{{BoundaryArc{{CurveKind::slit, 0}, 0.2, 1.5, Side::both}}}), Error);
}

TEST_CASE("set indicator answers per face") {
  const PlanarDomain d = fixtures::example1();
  const SetIndicator plus(d, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::plus)}});
  CHECK(plus.contains({CurveKind::slit, 0}, 0.5, Side::plus));
  CHECK_FALSE(plus.contains({CurveKind::slit, 0}, 0.5, Side::minus));
  CHECK_FALSE(plus.contains({CurveKind::slit, 0}, 0.9, Side::plus));
  CHECK_FALSE(plus.contains({CurveKind::outer, 0}, 0.5, Side::both));
}

TEST_CASE("extendible points") {
  const PlanarDomain d = fixtures::example1();
  const auto ext = find_extendible_points(d, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::both)}}, 1e-9);
  REQUIRE(ext.arcs.size() == 1);
  CHECK(ext.arcs[0].t0 == doctest::Approx(0.25));
  CHECK(ext.arcs[0].t1 == doctest::Approx(0.75));
  // One face only: no point is covered from both sides.
  CHECK(find_extendible_points(d, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::plus)}}, 1e-9).empty());
  // Overlap of the two faces shorter than tol_len is dropped.
  const BoundarySet sliver{{fixtures::slit_arc(-0.2, 0.0, Side::plus), fixtures::slit_arc(-0.001, 0.2, Side::minus)}};
  CHECK(find_extendible_points(d, sliver, 1e-2).empty());
  CHECK(find_extendible_points(d, sliver, 1e-4).arcs.size() == 1);
  // Type-1 arcs never contribute.
  CHECK(find_extendible_points(d, whole_boundary(d), 0.0).arcs.size() == 1);
}

TEST_CASE("widening and merging") {
  const auto m = merge_intervals({{0.5, 0.7}, {0.0, 0.2}, {0.1, 0.3}});
  REQUIRE(m.size() == 2);
  CHECK(m[0] == std::pair<double, double>{0.0, 0.3});

  const PlanarDomain d = fixtures::example1();
  const BoundarySet a{{fixtures::slit_arc(-0.25, 0.25, Side::both)}};
  const BoundarySet a10 = widen(d, a, 0.1);
  CHECK(arc_length(a10) == doctest::Approx(1.4));
  CHECK(set_contains(d, a10, a));
  CHECK_FALSE(set_contains(d, a, a10));
  CHECK(arc_length(widen(d, a, 5.0)) == doctest::Approx(2.0));  // clamped to the slit

  const PlanarDomain disc = fixtures::unit_disc(256);
  const BoundarySet arc{{fixtures::disc_arc(disc, 0.0, 3.0)}};
  const double L = disc.outer().length();
  CHECK(arc_length(widen(disc, arc, 10.0)) == doctest::Approx(L));  // saturates
  // Widening an arc across the seam stays one piece in length.
  const BoundarySet seam{{BoundaryArc{{CurveKind::outer, 0}, L - 0.1, L + 0.1, Side::both}}};
  CHECK(arc_length(widen(disc, seam, 0.05)) == doctest::Approx(0.3));
}

TEST_CASE("whole boundary") {
  const PlanarDomain d = fixtures::example1();
  CHECK(arc_length(whole_boundary(d)) == doctest::Approx(8.0 + 2.0));
}

TEST_CASE("circle detection") {
  const PlanarDomain disc = fixtures::unit_disc();
  const auto info = detect_circle(disc);
  REQUIRE(info);
  CHECK(std::abs(info->center) < 1e-12);
  CHECK(info->radius == doctest::Approx(1.0));
  for (double a : {0.0, 0.5, 3.0, 6.0}) {
    CHECK(circle_angle(*info, disc.outer(), circle_param(*info, disc.outer(), a)) == doctest::Approx(a));
  }
  CHECK_FALSE(detect_circle(fixtures::example1()));
  CHECK_FALSE(detect_circle(PlanarDomain(Curve(circle_vertices({0, 0}, 1.0, 8), true))));
}

TEST_CASE("json round trip") {
  const PlanarDomain d = fixtures::example1();
  const PlanarDomain back = domain_from_json(domain_to_json(d));
  CHECK(back.area() == doctest::Approx(d.area()));
  CHECK(back.slits().size() == 1);
  const BoundarySet s{{fixtures::slit_arc(-0.25, 0.1, Side::minus)}};
  const BoundarySet sb = set_from_json(set_to_json(s));
  REQUIRE(sb.arcs.size() == 1);
  CHECK(sb.arcs[0].side == Side::minus);
  CHECK(sb.arcs[0].t1 == doctest::Approx(0.6));
  // side defaults to both; bare arrays and {"arcs": ...} are both sets
  const json j = json::parse(R"([{"curve": "slit:0", "t0": 0.1, "t1": 0.2}])");
  CHECK(set_from_json(j).arcs[0].side == Side::both);
  CHECK(set_from_json(json{{"arcs", j}}).arcs.size() == 1);
  CHECK(CurveId::parse("hole:3").index == 3);
  CHECK_THROWS_AS(CurveId::parse("ring"), Error);
  CHECK(config_hash(domain_to_json(d)) == config_hash(domain_to_json(back)));
}

TEST_CASE("set coverage over a parameter window") {
  const PlanarDomain disc = fixtures::unit_disc(256);
  const double L = disc.outer().length();
  const BoundarySet set{{BoundaryArc{{CurveKind::outer, 0}, 1.0, 2.0}}};
  const SetIndicator ind(disc, set);
  const CurveId outer{CurveKind::outer, 0};
  CHECK(ind.coverage(outer, 1.5, 0.2, Side::plus) == doctest::Approx(1.0));
  CHECK(ind.coverage(outer, 1.0, 0.2, Side::plus) == doctest::Approx(0.5));
  CHECK(ind.coverage(outer, 2.05, 0.2, Side::plus) == doctest::Approx(0.25));
  CHECK(ind.coverage(outer, 3.0, 0.2, Side::plus) == 0.0);
  // wraps around the start of a closed curve
  const SetIndicator wrap(disc, BoundarySet{{BoundaryArc{{CurveKind::outer, 0}, L - 0.1, L + 0.1}}});
  CHECK(wrap.coverage(outer, 0.0, 0.1, Side::plus) == doctest::Approx(1.0));
  CHECK(wrap.coverage(outer, 0.15, 0.2, Side::plus) == doctest::Approx(0.25));
  // slits: faces separately, both faces averaged, clipped at the tips
  const PlanarDomain ex1 = fixtures::example1();
  const SetIndicator slit(ex1, BoundarySet{{fixtures::slit_arc(-0.5, 0.0, Side::plus)}});
  const CurveId s0{CurveKind::slit, 0};
  CHECK(slit.coverage(s0, 0.5, 0.2, Side::plus) == doctest::Approx(0.5));
  CHECK(slit.coverage(s0, 0.5, 0.2, Side::minus) == 0.0);
  CHECK(slit.coverage(s0, 0.5, 0.2, Side::both) == doctest::Approx(0.25));
  CHECK(slit.coverage(s0, 0.0, 0.2, Side::plus) == doctest::Approx(1.0));
  CHECK(slit.coverage(s0, 0.3, 0.0, Side::plus) == 1.0);
}
