#include "crossenv/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "crossenv/error.hpp"

namespace crossenv::fixtures {

PlanarDomain unit_disc(std::size_t vertices) {
  return PlanarDomain(Curve(circle_vertices({0.0, 0.0}, 1.0, vertices), true));
}

PlanarDomain example1() {
  Curve square({{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}, true);
  Curve slit({{-0.5, 0.0}, {0.5, 0.0}}, false);
  return PlanarDomain(std::move(square), {}, {std::move(slit)});
}

PlanarDomain half_disc(double radius, std::size_t arc_vertices) {
  std::vector<Point> v{{-radius, 0.0}, {-1.0, 0.0}, {1.0, 0.0}, {radius, 0.0}};
  for (std::size_t k = 1; k < arc_vertices; ++k) {
    v.push_back(std::polar(radius, std::numbers::pi * static_cast<double>(k) / static_cast<double>(arc_vertices)));
  }
  return PlanarDomain(Curve(std::move(v), true));
}

BoundaryArc disc_arc(const PlanarDomain& disc, double a, double b) {
  const auto circle = detect_circle(disc);
  if (!circle) fail(ErrorCode::invalid_input, "disc_arc needs a polygonal circle");
  const Curve& outer = disc.outer();
  const double t0 = circle_param(*circle, outer, a);
  return {{CurveKind::outer, 0}, t0, t0 + (b - a) / (2.0 * std::numbers::pi) * outer.length(), Side::both};
}

BoundaryArc slit_arc(double x0, double x1, Side side) {
  return {{CurveKind::slit, 0}, x0 + 0.5, x1 + 0.5, side};
}

BoundaryArc diameter_arc(const PlanarDomain& half_disc, double x0, double x1) {
  const double start = half_disc.outer().vertices().front().real();
  return {{CurveKind::outer, 0}, x0 - start, x1 - start, Side::both};
}

CrossSpec example2() {
  const PlanarDomain disc = unit_disc();
  return {example1(), BoundarySet{{slit_arc(-0.25, 0.25, Side::both)}}, disc, whole_boundary(disc)};
}

CrossSpec half_arc_cross() {
  const PlanarDomain disc = unit_disc();
  const BoundarySet upper{{disc_arc(disc, 0.0, std::numbers::pi)}};
  return {disc, upper, disc, upper};
}

}  // namespace crossenv::fixtures
