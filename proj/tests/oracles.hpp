#pragma once

// Reference computations used as independent oracles. They share nothing
// with the library beyond the Point type.

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "crossenv/polyline.hpp"

namespace crossenv::test {

/// Winding number of a closed polygon around p by summing signed angles.
inline int winding_number(Point p, const std::vector<Point>& poly) {
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i] - p, b = poly[(i + 1) % poly.size()] - p;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

inline double brute_distance(Point p, const std::vector<std::pair<Point, Point>>& segs) {
  double best = INFINITY;
  for (const auto& [a, b] : segs) {
    const Point d = b - a;
    double s = ((p - a) * std::conj(d)).real() / std::norm(d);
    s = std::fmin(1.0, std::fmax(0.0, s));
    best = std::fmin(best, std::abs(p - (a + s * d)));
  }
  return best;
}

/// ω(z, A, unit disc) = 1 - ∫_A P(z, e^{iθ}) dθ / 2π with the Poisson kernel,
/// by composite Simpson on [a, b].
inline double disc_measure_quadrature(Point z, double a, double b, int panels = 20000) {
  auto poisson = [z](double t) {
    const Point e = std::polar(1.0, t);
    return (1.0 - std::norm(z)) / std::norm(e - z);
  };
  const double h = (b - a) / panels;
  double s = poisson(a) + poisson(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * poisson(a + i * h);
  return 1.0 - s * h / 3.0 / (2.0 * std::numbers::pi);
}

/// ω(z, [a, b], upper half-plane) = 1 - (arg(z - b) - arg(z - a)) / π.
inline double halfplane_reference(Point z, double a, double b) {
  return 1.0 - (std::atan2(z.imag(), z.real() - b) - std::atan2(z.imag(), z.real() - a)) / std::numbers::pi;
}

}  // namespace crossenv::test
