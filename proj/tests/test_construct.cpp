#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "crossenv/error.hpp"
#include "crossenv/construct.hpp"
#include "crossenv/fixtures.hpp"

using namespace crossenv;
using crossenv::test::winding_number;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::config_error;
}

/// Points of the pocket polygon, by rejection from its bounding box.
std::vector<Point> inside(const std::vector<Point>& poly, int count, std::uint64_t seed) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Point p : poly) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::vector<Point> out;
  for (int tries = 0; static_cast<int>(out.size()) < count && tries < 1000000; ++tries) {
    const Point p(ux(rng), uy(rng));
    if (winding_number(p, poly) != 0) out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("companion of a disc arc") {
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundaryArc arc = fixtures::disc_arc(disc, 0.0, kPi / 2);
  const CompanionCurve cc = build_companion(disc, arc, 10);
  CHECK(cc.checks.endpoints_pinned);
  CHECK(cc.checks.offset_within);
  CHECK(cc.checks.pocket_disjoint);
  CHECK(cc.sup_offset <= 0.05 + 1e-12);
  CHECK(cc.sup_offset > 0.04);
  CHECK(cc.offset.vertices().front() == disc.outer().point_at(arc.t0));
  CHECK(cc.offset.vertices().back() == disc.outer().point_at(arc.t1));
  // Pocket outside the circle: sampled pocket points are outside the disc
  // polygon by the winding-number oracle.
  const auto pts = inside(cc.pocket.front().vertices(), 300, 1);
  REQUIRE(pts.size() == 300);
  for (const Point p : pts) {
    CHECK(winding_number(p, disc.outer().vertices()) == 0);
    CHECK(std::arg(p) >= -1e-9);
    CHECK(std::arg(p) <= kPi / 2 + 1e-9);
  }
  CHECK(cc.pocket_area() > 0.0);
  CHECK(std::abs(cc.at(arc.t0 + 0.5 * arc.length()) - std::polar(1.05, kPi / 4)) < 2e-3);
}

TEST_CASE("companion of a whole closed curve is closed") {
  const PlanarDomain disc = fixtures::unit_disc();
  const CompanionCurve cc = build_companion(disc, whole_boundary(disc).arcs.front(), 10);
  CHECK(cc.closed);
  CHECK(cc.offset.closed());
  REQUIRE(cc.pocket.size() == 2);
  // Annulus between radii 1 and 1 + 1/20 (polygonal areas).
  const double expected = std::abs(signed_area(circle_vertices(0.0, 1.05, 2048))) - std::abs(disc.outer().signed_area());
  CHECK(cc.pocket_area() == doctest::Approx(expected).epsilon(2e-3));
  // A ∩ Γ = ∅: every offset vertex is off the base curve.
  for (const Point p : cc.offset.vertices()) CHECK(disc.boundary_distance(p) > 0.04);
}

TEST_CASE("companion errors") {
  const PlanarDomain ex1 = fixtures::example1();
  CHECK(code_of([&] { build_companion(ex1, fixtures::slit_arc(-0.25, 0.25, Side::both), 10); }) ==
        ErrorCode::type_mismatch);
  // A hole close to the outer curve leaves too little room for k = 1.
  const PlanarDomain tight(Curve({{2, 2}, {-2, 2}, {-2, -2}, {2, -2}}, true),
                           {Curve(circle_vertices({0, 0}, 0.5, 64), true)});
  const BoundarySet whole_hole{{BoundaryArc{{CurveKind::hole, 0}, 0.0, tight.holes()[0].length()}}};
  CHECK(code_of([&] { build_companion(tight, whole_hole.arcs[0], 1); }) == ErrorCode::no_clearance);
  CHECK_NOTHROW(build_companion(tight, whole_hole.arcs[0], 10));
}

TEST_CASE("D_k assembly") {
  const PlanarDomain disc = fixtures::unit_disc();
  SUBCASE("one pocket") {
    const BoundarySet ak{{fixtures::disc_arc(disc, 0.0, kPi / 2)}};
    const DkResult dk = build_Dk_detailed(disc, ak, 10);
    CHECK(dk.k == 10);
    CHECK(dk.companions.size() == 1);
    CHECK(dk.domain.area() == doctest::Approx(disc.area() + dk.companions[0].pocket_area()).epsilon(1e-9));
    // D ⊆ D_k
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const Point p(u(rng), u(rng));
      if (disc.contains(p)) CHECK(dk.domain.contains(p, 0.0));
    }
    // points of A are interior to D_k
    CHECK(dk.domain.contains(std::polar(1.0, kPi / 4)));
  }
  SUBCASE("entire circle") {
    const DkResult dk = build_Dk_detailed(disc, whole_boundary(disc), 10);
    CHECK(dk.domain.area() > disc.area());
    CHECK(dk.domain.contains(0.999));
  }
  SUBCASE("type-2 pieces are welded") {
    const PlanarDomain ex1 = fixtures::example1();
    const DkResult dk = build_Dk_detailed(ex1, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::both)}}, 10);
    CHECK(dk.companions.empty());
    REQUIRE(dk.welded.size() == 1);
    CHECK(dk.domain.slits().size() == 2);
    CHECK(dk.domain.area() == doctest::Approx(ex1.area()));
    CHECK(dk.domain.contains({0.0, 0.0}));
    CHECK_FALSE(dk.domain.contains({0.4, 0.0}));
  }
  SUBCASE("components") {
    const BoundarySet two{{fixtures::disc_arc(disc, 0.0, 1.0), fixtures::disc_arc(disc, 1.0, 2.0),
                           fixtures::disc_arc(disc, 3.0, 4.0)}};
    CHECK(components(disc, two).size() == 2);
  }
}

TEST_CASE("gluing identity on a disc with a pocket") {
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundarySet ak{{fixtures::disc_arc(disc, 0.0, kPi / 2)}};
  const DkResult dk = build_Dk_detailed(disc, ak, 20);
  const std::vector<Point> samples{{0.2, 0.1}, {0.6, 0.5}, {-0.5, 0.2}, {0.1, -0.7}, {0.85, 0.1}};
  GridConfig g64, g128;
  g64.spacing = 1.0 / 64;
  g128.spacing = 1.0 / 128;
  const GluingReport a = verify_gluing(disc, ak, dk, samples, g64);
  const GluingReport b = verify_gluing(disc, ak, dk, samples, g128);
  CHECK(b.pass());
  CHECK(b.max_discrepancy < a.max_discrepancy);
  CHECK(b.to_json()["samples"].size() == samples.size());

  SUBCASE("fully pocketed boundary gives zero on both sides") {
    const BoundarySet all = whole_boundary(disc);
    const GluingReport r = verify_gluing(disc, all, build_Dk_detailed(disc, all, 10), {{0.1, 0.2}}, g64);
    CHECK(r.samples[0].on_D == doctest::Approx(0.0));
    CHECK(r.samples[0].on_Dk == doctest::Approx(0.0));
  }
  SUBCASE("near the arc both values are small") {
    const Point z = std::polar(0.99, kPi / 4);
    const GluingReport r = verify_gluing(disc, ak, dk, {z}, g128);
    CHECK(r.samples[0].on_D <= 0.05);
    CHECK(r.samples[0].on_Dk <= 0.05);
  }
}

TEST_CASE("Levi form") {
  const auto ball = ball_with_cap(2);
  CHECK(levi_min_eigenvalue(ball.rho, {0.6, 0.0, 0.0, 0.8}, 2, 1e-4) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(levi_min_eigenvalue(ball_with_cap(1).rho, {0.6, 0.8}, 1, 1e-4) == doctest::Approx(1.0).epsilon(1e-6));
  // Re z1 is pluriharmonic; |z1|^2 - |z2|^2 is indefinite on the tangent space.
  const ScalarField flat = [](const std::vector<double>& x) { return x[0]; };
  CHECK(std::abs(levi_min_eigenvalue(flat, {0.1, 0.2, 0.3, 0.4}, 2, 1e-4)) < 1e-6);
  const ScalarField saddle = [](const std::vector<double>& x) {
    return x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
  };
  CHECK(levi_min_eigenvalue(saddle, {1.0, 0.0, 0.5, 0.0}, 2, 1e-4) < -0.5);
}

TEST_CASE("level-set sequence for the disc and the ball") {
  PropCOptions opt;
  opt.grid = 101;
  const PropCResult disc = build_propC_sequence(ball_with_cap(1), opt);
  CHECK(disc.domains.size() == opt.ks.size());
  CHECK(disc.report.pass());
  CHECK(disc.report.N >= 1);
  CHECK(disc.report.N <= 64);
  CHECK(disc.report.rho_levi_min == doctest::Approx(1.0).epsilon(1e-5));
  for (const auto& e : disc.report.entries) {
    CHECK(e.nesting);
    CHECK(e.trace);
  }
  // nesting holds pointwise by construction of φ_k = ρ - λ/k
  // over the cap: in D_1 (λ = 0.1), not in D_64 (λ/64 < ρ = 0.0201)
  const std::vector<double> x{1.01, 0.0};
  CHECK(disc.domains.front().contains(x));
  CHECK_FALSE(disc.domains.back().contains(x));

  opt.grid = 11;
  const PropCResult ball = build_propC_sequence(ball_with_cap(2), opt);
  CHECK(ball.report.N >= 1);
  CHECK(ball.report.N <= 64);
  CHECK(ball.report.to_json()["entries"].size() == opt.ks.size());
}

TEST_CASE("degenerate and failing level-set sequences") {
  LevelSetDomain flat = ball_with_cap(1);
  flat.lam = [](const std::vector<double>&) { return 0.0; };
  PropCOptions opt;
  opt.grid = 41;
  const PropCReport rep = build_propC_sequence(flat, opt).report;
  CHECK(rep.degenerate);
  CHECK(rep.N == 1);
  for (const auto& e : rep.entries) CHECK(e.trace);

  // λ too steep for any tested k: the Levi form stays negative.
  LevelSetDomain steep = ball_with_cap(1, 0.3, 1.0, 0.01);
  opt.ks = {1, 2, 4};
  opt.grid = 101;  // rays must resolve the 0.01-wide transition
  CHECK(code_of([&] { build_propC_sequence(steep, opt); }) == ErrorCode::not_strongly_pseudoconvex);
}

TEST_CASE("separator witnesses") {
  EngineConfig cfg;
  cfg.grid.spacing = 1.0 / 64;
  MeasureEvaluator eval(cfg);
  SeparatorOptions opt;
  opt.k_max = 64;

  SUBCASE("interior case on disc x disc") {
    const CrossSpec cross = fixtures::half_arc_cross();
    const SeparatorQuery q{{0.0, 0.2}, {0.0, -0.2}, 0.05};
    const SeparatorWitness w = find_separator(cross, q, eval, opt);
    CHECK(w.kind == WitnessKind::cross_envelope_k);
    CHECK(w.boundary_residual <= 1e-3);
    CHECK(std::norm(w.z - q.z0) + std::norm(w.w - q.w0) <= q.radius * q.radius);
    const BoundarySet ak = widen(cross.D, cross.A, 1.0 / w.k), bk = widen(cross.G, cross.B, 1.0 / w.k);
    const double sum = eval.evaluate(cross.D, ak, w.z).value + eval.evaluate(cross.G, bk, w.w).value;
    CHECK(std::abs(sum - 1.0) <= 1e-3);
    CHECK(w.to_json()["kind"] == "cross_envelope_k");
  }

  SUBCASE("boundary case on a type-1 arc") {
    const CrossSpec cross = fixtures::half_arc_cross();
    const Point z0 = std::polar(1.0, kPi / 2);  // on A
    const SeparatorQuery q{z0, {0.0, 0.1}, 0.05};
    const SeparatorWitness w = find_separator(cross, q, eval, opt);
    CHECK(w.kind == WitnessKind::product_k);
    CHECK(std::abs(w.z - z0) <= 2.0 / w.k);
    CHECK(w.boundary_residual <= 1e-3);
  }

  SUBCASE("Example 2 has no witness") {
    const CrossSpec ex2 = fixtures::example2();
    opt.ks = {1, 2, 4, 8, 16, 32, 64};
    try {
      find_separator(ex2, {{0.1, 0.0}, {0.0, 0.3}, 0.05}, eval, opt);
      FAIL("expected NoWitness");
    } catch (const NoWitness& e) {
      CHECK(e.code() == ErrorCode::no_witness);
      CHECK(e.diagnostics().size() == opt.ks.size());
    }
  }
}
