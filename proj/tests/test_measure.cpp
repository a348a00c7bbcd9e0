#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "crossenv/error.hpp"
#include "crossenv/fixtures.hpp"
#include "crossenv/measure.hpp"

using namespace crossenv;
using crossenv::test::disc_measure_quadrature;
using crossenv::test::halfplane_reference;

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

std::vector<Point> disc_points(int n, double rmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Point p(u(rng), u(rng));
    if (std::abs(p) <= rmax) pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("disc closed form matches Poisson quadrature") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi), len(0.05, 2.0 * kPi - 0.05);
  for (const Point z : disc_points(40, 0.95, 1)) {
    const double a = angle(rng), b = a + len(rng);
    CHECK(disc_arc_measure(z, {{a, b}}) == doctest::Approx(disc_measure_quadrature(z, a, b)).epsilon(1e-9));
  }
  CHECK(disc_arc_measure(0.0, {{0.0, kPi}}) == doctest::Approx(0.5));
  CHECK(disc_arc_measure(0.3, {{0.0, 2.0 * kPi}}) == doctest::Approx(0.0));
  // overlapping pieces count once
  CHECK(disc_arc_measure(0.2, {{0.0, 1.0}, {0.5, 2.0}}) == doctest::Approx(disc_arc_measure(0.2, {{0.0, 2.0}})));
  CHECK(code_of([] { disc_arc_measure(1.0, {{0.0, 1.0}}); }) == ErrorCode::point_on_boundary);
}

TEST_CASE("half-plane closed form") {
  for (const Point z : {Point(0, 1), Point(0.3, 0.2), Point(-4, 0.5), Point(2, 7)}) {
    CHECK(halfplane_interval_measure(z, {{-1.0, 1.0}}) == doctest::Approx(halfplane_reference(z, -1.0, 1.0)));
  }
  CHECK(halfplane_interval_measure({0, 1}, {{-1.0, 1.0}}) == doctest::Approx(0.5));
  CHECK(code_of([] { halfplane_interval_measure({0, -1}, {{-1.0, 1.0}}); }) == ErrorCode::point_on_boundary);
}

TEST_CASE("closed-form engine on the polygonal disc") {
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundarySet set{{fixtures::disc_arc(disc, 0.4, 2.0)}};
  const auto pts = disc_points(10, 0.9, 2);
  const MeasureField f = closed_form_measure(disc, set, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(f.values[i] == doctest::Approx(disc_measure_quadrature(pts[i], 0.4, 2.0)).epsilon(1e-8));
    CHECK(f.std_error[i] == 0.0);
  }
  CHECK(code_of([] {
          closed_form_measure(fixtures::example1(), BoundarySet{{fixtures::slit_arc(0, 0.1, Side::both)}}, {{0.5, 0.5}});
        }) == ErrorCode::invalid_input);
}

TEST_CASE("grid engine converges to the disc measure at first order") {
  // An arc endpoint ζ misplaced by δ moves ω by about δ P(z, ζ) / 2π; with
  // δ = h per endpoint plus a smooth O(h) part this bounds the error.
  const PlanarDomain disc = fixtures::unit_disc();
  const double a = 0.3, b = 0.3 + kPi;
  const BoundarySet set{{fixtures::disc_arc(disc, a, b)}};
  const auto pts = disc_points(30, 0.9, 4);
  auto kernel = [](Point z, double t) {
    return (1.0 - std::norm(z)) / std::norm(std::polar(1.0, t) - z) / (2.0 * kPi);
  };
  std::vector<double> worst;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    GridConfig cfg;
    cfg.spacing = h;
    const auto sol = GridSystem(disc, cfg).solve(set);
    CHECK(sol.residual() <= 1e-10);
    double err = 0.0;
    for (const Point z : pts) {
      const double e = std::abs(sol.value(z) - disc_measure_quadrature(z, a, b));
      CHECK(e <= h * (kernel(z, a) + kernel(z, b) + 0.1));
      err = std::max(err, e);
    }
    worst.push_back(err);
  }
  CHECK(worst.back() < 0.5 * worst.front());
}

TEST_CASE("grid solution properties") {
  const PlanarDomain d = fixtures::example1();
  GridConfig cfg;
  cfg.spacing = 1.0 / 64;
  const GridSystem sys(d, cfg);
  const BoundarySet small{{fixtures::slit_arc(-0.1, 0.1, Side::both)}};
  const BoundarySet large{{fixtures::slit_arc(-0.3, 0.3, Side::both), BoundaryArc{{CurveKind::outer, 0}, 0.5, 1.5}}};
  const auto s = sys.solve(small), l = sys.solve(large);
  for (std::size_t i = 0; i < s.nodal().size(); ++i) {
    CHECK(s.nodal()[i] >= -1e-12);
    CHECK(s.nodal()[i] <= 1.0 + 1e-12);
    CHECK(l.nodal()[i] <= s.nodal()[i] + 1e-12);  // A ⊆ A' ⇒ ω(·,A') ≤ ω(·,A)
  }
  CHECK(s.residual() <= 1e-10);
  CHECK(sys.cut_nodes() > 0);
  CHECK(sys.unknowns() == s.nodal().size());
  // A face-only set sees the slit from one side.
  const auto plus = sys.solve(BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::plus)}});
  CHECK(plus.value({0.0, 0.3}) < plus.value({0.0, -0.3}) - 0.3);
  const auto minus = sys.solve(BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::minus)}});
  CHECK(minus.value({0.0, -0.3}) == doctest::Approx(plus.value({0.0, 0.3})).epsilon(1e-9));
}

TEST_CASE("Example 1 measure at 0.5i") {
  const PlanarDomain d = fixtures::example1();
  const BoundarySet a{{fixtures::slit_arc(-0.25, 0.25, Side::both)}};
  GridConfig c128, c256;
  c128.spacing = 1.0 / 128;
  c256.spacing = 1.0 / 256;
  const double v128 = GridSystem(d, c128).solve(a).value({0.0, 0.5});
  const double v256 = GridSystem(d, c256).solve(a).value({0.0, 0.5});
  // Frozen regression value for the h = 1/256 solve.
  CHECK(v256 == doctest::Approx(0.770758091).epsilon(1e-7));
  // Independent route: walk on spheres against the Richardson extrapolant.
  const double richardson = 2.0 * v256 - v128;
  WosConfig w;
  w.samples = 40000;
  const MeasureField f = wos_measure(d, a, w, {{0.0, 0.5}});
  CHECK(std::abs(f.values[0] - richardson) <= 3.0 * f.std_error[0] + 2e-3);
}

TEST_CASE("grid error paths") {
  const PlanarDomain d = fixtures::example1();
  GridConfig coarse;
  coarse.spacing = 0.3;
  CHECK(code_of([&] { GridSystem sys(d, coarse); }) == ErrorCode::grid_too_coarse);
  GridConfig cfg;
  cfg.spacing = 1.0 / 32;
  CHECK(code_of([&] { GridSystem(d, cfg).solve(BoundarySet{}); }) == ErrorCode::degenerate_set);
  CHECK(code_of([&] { grid_measure(d, BoundarySet{{fixtures::slit_arc(0, 0.1, Side::both)}}, cfg, {{0.1, 0.0}}); }) ==
        ErrorCode::point_on_boundary);
}

TEST_CASE("walk on spheres") {
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundarySet half{{fixtures::disc_arc(disc, 0.0, kPi)}};
  WosConfig cfg;
  cfg.samples = 20000;
  const MeasureField f = wos_measure(disc, half, cfg, {0.0});
  CHECK(std::abs(f.values[0] - 0.5) <= 3.0 * f.std_error[0]);
  CHECK(f.std_error[0] == doctest::Approx(std::sqrt(f.values[0] * (1 - f.values[0]) / cfg.samples)));

  SUBCASE("bit-identical across thread counts and runs") {
    const std::vector<Point> pts{{0.1, 0.2}, {-0.6, 0.1}, {0.3, -0.7}};
    cfg.samples = 1500;
    cfg.threads = 1;
    const ExitTable a = WosSampler(disc, cfg).run(pts);
    cfg.threads = 3;
    const ExitTable b = WosSampler(disc, cfg).run(pts);
    const ExitTable c = WosSampler(disc, cfg).run(pts);
    REQUIRE(a.exits.size() == b.exits.size());
    bool same = true;
    for (std::size_t i = 0; i < a.exits.size(); ++i) {
      same = same && a.exits[i].t == b.exits[i].t && a.exits[i].tag == b.exits[i].tag && b.exits[i].t == c.exits[i].t;
    }
    CHECK(same);
    cfg.seed = 1;
    const ExitTable d = WosSampler(disc, cfg).run(pts);
    CHECK(d.exits[0].t != a.exits[0].t);
  }

  SUBCASE("half-disc proxy for the half-plane") {
    const PlanarDomain hd = fixtures::half_disc();
    cfg.samples = 20000;
    const MeasureField g = wos_measure(hd, BoundarySet{{fixtures::diameter_arc(hd, -1.0, 1.0)}}, cfg, {{0.0, 1.0}});
    CHECK(std::abs(g.values[0] - halfplane_interval_measure({0, 1}, {{-1.0, 1.0}})) <= 3.0 * g.std_error[0] + 1e-2);
  }

  SUBCASE("slit faces") {
    const PlanarDomain d = fixtures::example1();
    cfg.samples = 4000;
    const MeasureField g = wos_measure(d, BoundarySet{{fixtures::slit_arc(-0.5, 0.5, Side::plus)}}, cfg,
                                       {{0.0, 0.05}, {0.0, -0.05}});
    CHECK(g.values[0] < 0.2);
    CHECK(g.values[1] > 0.8);
  }

  SUBCASE("errors") {
    cfg.samples = 10;
    cfg.max_steps = 1;
    cfg.retry_cap = 0;
    // from the centre one step lands on the circle, so start off-centre
    CHECK(code_of([&] { WosSampler(disc, cfg).run({{0.3, 0.2}}); }) == ErrorCode::step_budget_exceeded);
    cfg.max_steps = 1000;
    CHECK(code_of([&] { WosSampler(disc, cfg).run({{2.0, 0.0}}); }) == ErrorCode::invalid_input);
    cfg.samples = 0;
    CHECK(code_of([&] { WosSampler s(disc, cfg); }) == ErrorCode::config_error);
  }
}

TEST_CASE("cross validation and CSV export") {
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundarySet set{{fixtures::disc_arc(disc, 1.0, 3.0)}};
  GridConfig g;
  g.spacing = 1.0 / 64;
  WosConfig w;
  w.samples = 20000;
  const auto rep = cross_validate(disc, set, {{0.2, 0.1}, {-0.4, -0.3}}, g, w, 1e-2);
  CHECK(rep.all_clear());
  REQUIRE(rep.rows.size() == 2);
  REQUIRE(rep.rows[0].closed_form);
  CHECK(std::abs(rep.rows[0].grid - *rep.rows[0].closed_form) <= 1e-2);
  CHECK(rep.to_json()["rows"].size() == 2);

  MeasureField f;
  f.points = {{0.5, 0.25}};
  f.values = {0.125};
  f.std_error = {0.0};
  f.engine = Engine::grid;
  const std::string csv = field_to_csv(f, "note");
  CHECK(csv.rfind("# note\nx,y,value,stderr,engine\n", 0) == 0);
  CHECK(csv.find("grid") != std::string::npos);
  CHECK(parse_engine("wos") == Engine::wos);
  CHECK_THROWS_AS(parse_engine("fem"), Error);
}
