#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "crossenv/error.hpp"
#include "crossenv/envelope.hpp"
#include "crossenv/fixtures.hpp"

using namespace crossenv;
using crossenv::test::disc_measure_quadrature;

namespace {

constexpr double kPi = std::numbers::pi;

EngineConfig engine(Engine e, double h = 1.0 / 64) {
  EngineConfig cfg;
  cfg.engine = e;
  cfg.grid.spacing = h;
  cfg.wos.samples = 4000;
  return cfg;
}

}  // namespace

TEST_CASE("membership against the closed form") {
  const CrossSpec spec = fixtures::half_arc_cross();
  MeasureEvaluator eval(engine(Engine::closed_form));
  const Point z(0.0, 0.5), w(0.0, -0.1);
  const Membership m = envelope_membership(spec, z, w, eval);
  const double expected = 1.0 - disc_measure_quadrature(z, 0.0, kPi) - disc_measure_quadrature(w, 0.0, kPi);
  CHECK(m.margin == doctest::Approx(expected).epsilon(1e-8));
  CHECK(m.verdict == (expected > 0 ? Verdict::inside : Verdict::outside));
  // ω(0) + ω(0) = 1: on the boundary of the envelope.
  CHECK(envelope_membership(spec, 0.0, 0.0, eval).verdict == Verdict::indeterminate);
  // ω(iy) + ω(-iy) = 1 by symmetry.
  CHECK(std::abs(envelope_membership(spec, {0, 0.4}, {0, -0.4}, eval).margin) < 1e-10);
  CHECK_THROWS_AS(envelope_membership(spec, 1.5, 0.0, eval), Error);
}

TEST_CASE("Example 2 envelope is the whole product") {
  const CrossSpec spec = fixtures::example2();
  MeasureEvaluator eval(engine(Engine::grid));
  const auto zs = interior_grid(spec.D, 12, 12, 0.05);
  REQUIRE(zs.size() > 50);
  for (const Point w : {Point(0, 0), Point(0.5, -0.3), Point(-0.1, 0.85)}) {
    const EnvelopeSlice s = envelope_slice(spec, w, zs, eval);
    CHECK(s.inside_count() == zs.size());
    CHECK(std::all_of(s.mask.begin(), s.mask.end(), [](bool b) { return b; }));
  }
  const EnvelopeSlice fz = envelope_slice_fixed_z(spec, {0.0, 0.5}, interior_grid(spec.G, 8, 8, 0.05), eval);
  CHECK_FALSE(fz.fixed_in_G);
  CHECK(fz.inside_count() == fz.points.size());
  const json summary = slice_summary(spec, fz);
  CHECK(summary["counts"]["inside"] == fz.points.size());
  CHECK(summary["mask_all_true"] == true);
  const std::string csv = slice_to_csv(fz, "c");
  CHECK(csv.rfind("# c\nx,y,margin,mask\n", 0) == 0);
}

TEST_CASE("evaluator caches one factorisation per domain") {
  const PlanarDomain disc = fixtures::unit_disc(512);
  MeasureEvaluator eval(engine(Engine::grid));
  const BoundarySet a{{fixtures::disc_arc(disc, 0.0, 1.0)}}, b{{fixtures::disc_arc(disc, 2.0, 4.0)}};
  const double va = eval.evaluate(disc, a, 0.1).value;
  eval.evaluate(disc, b, 0.1);
  CHECK(eval.evaluate(disc, a, 0.1).value == va);
  CHECK(eval.cached_systems() == 1);
  CHECK(eval.cached_solutions() == 2);
}

TEST_CASE("interior lattice") {
  const PlanarDomain d = fixtures::example1();
  const auto pts = interior_grid(d, 20, 20, 0.1);
  CHECK_FALSE(pts.empty());
  for (const Point p : pts) {
    CHECK(d.contains(p));
    CHECK(d.boundary_distance(p) >= 0.1);
  }
}

TEST_CASE("monotone convergence of ω(z, A_k, D)") {
  const PlanarDomain d = fixtures::example1();
  const BoundarySet a{{fixtures::slit_arc(-0.25, 0.25, Side::both)}};
  const auto family = neighborhood_family(d, a, {4, 8, 16, 32});
  REQUIRE(family.size() == 4);
  for (std::size_t i = 1; i < family.size(); ++i) CHECK(set_contains(d, family[i - 1].second, family[i].second));
  MeasureEvaluator eval(engine(Engine::grid));
  const ConvergenceReport rep = check_monotone_convergence(d, a, family, {{0.0, 0.5}, {0.6, -0.4}}, eval);
  CHECK(rep.monotone);
  CHECK(rep.discrepancy_decreasing);
  CHECK(rep.pass());
  CHECK(rep.residual_length == doctest::Approx(2.0 * 2.0 / 32));
  for (std::size_t k = 0; k < rep.ks.size(); ++k) CHECK(rep.values[k][0] <= rep.limit[0] + 1e-12);

  auto reversed = family;
  std::reverse(reversed.begin(), reversed.end());
  try {
    check_monotone_convergence(d, a, reversed, {{0.0, 0.5}}, eval);
    FAIL("expected NotNested");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_nested);
  }
}

TEST_CASE("cross spec files") {
  const CrossSpec spec = fixtures::example2();
  const CrossSpec back = spec_from_json(spec_to_json(spec));
  CHECK(back.D.slits().size() == 1);
  CHECK(arc_length(back.B) == doctest::Approx(arc_length(spec.B)));
  const CrossSpec sw = swapped(spec);
  CHECK(sw.D.slits().empty());
  CHECK(sw.G.slits().size() == 1);

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "crossenv_spec_test";
  std::filesystem::create_directories(dir);
  write_text(dir / "d.json", domain_to_json(spec.D).dump());
  const json j = {{"D", "d.json"}, {"A", set_to_json(spec.A)}, {"G", domain_to_json(spec.G)}, {"B", set_to_json(spec.B)}};
  CHECK(spec_from_json(j, dir).D.area() == doctest::Approx(4.0));
  CHECK_THROWS_AS(spec_from_json(json{{"D", "missing.json"}}, dir), Error);

  CrossSpec empty = spec;
  empty.A = BoundarySet{};
  try {
    validate(empty);
    FAIL("expected DegenerateSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_set);
  }
}
