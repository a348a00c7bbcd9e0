#include <algorithm>
#include <cmath>
#include <numbers>

#include "crossenv/error.hpp"
#include "crossenv/measure.hpp"

namespace crossenv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Disjoint sub-intervals of [0, 2π) covered by the given angle intervals.
std::vector<std::pair<double, double>> fold_angles(const std::vector<std::pair<double, double>>& arcs) {
  std::vector<std::pair<double, double>> pieces;
  for (auto [a, b] : arcs) {
    if (!(b > a)) fail(ErrorCode::invalid_set, "arc angle interval must satisfy b > a");
    if (b - a >= kTwoPi) return {{0.0, kTwoPi}};
    const double shift = std::floor(a / kTwoPi) * kTwoPi;
    a -= shift;
    b -= shift;
    if (b <= kTwoPi) {
      pieces.emplace_back(a, b);
    } else {
      pieces.emplace_back(a, kTwoPi);
      pieces.emplace_back(0.0, b - kTwoPi);
    }
  }
  return merge_intervals(std::move(pieces));
}

/// Harmonic measure in the disc of one arc (a, b) of length at most π/2,
/// from the counter-clockwise angle the chord subtends at z. The angle
/// exceeds π once z is past the chord, on the arc's side.
double short_arc(Point z, double a, double b) {
  double theta = std::arg((std::polar(1.0, b) - z) / (std::polar(1.0, a) - z));
  if (theta < 0.0) theta += kTwoPi;
  return theta / std::numbers::pi - (b - a) / kTwoPi;
}

}  // namespace

double disc_arc_measure(Point z, const std::vector<std::pair<double, double>>& arcs) {
  if (std::abs(z) >= 1.0 - 1e-12) fail(ErrorCode::point_on_boundary, "point is not inside the unit disc");
  double covered = 0.0;
  for (const auto& [a, b] : fold_angles(arcs)) {
    const int pieces = static_cast<int>(std::ceil((b - a) / (0.5 * std::numbers::pi)));
    const double step = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) covered += short_arc(z, a + i * step, i + 1 == pieces ? b : a + (i + 1) * step);
  }
  return std::clamp(1.0 - covered, 0.0, 1.0);
}

double halfplane_interval_measure(Point z, const std::vector<std::pair<double, double>>& intervals) {
  if (!(z.imag() > 0.0)) fail(ErrorCode::point_on_boundary, "point is not in the upper half-plane");
  std::vector<std::pair<double, double>> iv;
  for (const auto& [a, b] : intervals) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
      fail(ErrorCode::invalid_set, "intervals must be bounded with b > a");
    }
    iv.emplace_back(a, b);
  }
  double angle = 0.0;
  for (const auto& [a, b] : merge_intervals(std::move(iv))) angle += std::arg((b - z) / (a - z));
  return std::clamp(1.0 - angle / std::numbers::pi, 0.0, 1.0);
}

MeasureField closed_form_measure(const PlanarDomain& domain, const BoundarySet& set, const std::vector<Point>& points) {
  const auto circle = detect_circle(domain);
  if (!circle) fail(ErrorCode::invalid_input, "closed form needs a polygonal circle without holes or slits");
  validate(domain, set);
  const Curve& outer = domain.outer();
  std::vector<std::pair<double, double>> arcs;
  for (const BoundaryArc& arc : set.arcs) {
    const double a = circle_angle(*circle, outer, arc.t0);
    arcs.emplace_back(a, a + kTwoPi * (arc.t1 - arc.t0) / outer.length());
  }
  MeasureField field;
  field.engine = Engine::closed_form;
  field.points = points;
  field.std_error.assign(points.size(), 0.0);
  for (const Point& z : points) {
    field.values.push_back(disc_arc_measure((z - circle->center) / circle->radius, arcs));
  }
  return field;
}

}  // namespace crossenv
