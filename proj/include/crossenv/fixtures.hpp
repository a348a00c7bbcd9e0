#pragma once

#include <cstddef>

#include "crossenv/envelope.hpp"
#include "crossenv/geometry.hpp"

namespace crossenv::fixtures {

/// Regular n-gon inscribed in the unit circle, vertex 0 at angle 0.
PlanarDomain unit_disc(std::size_t vertices = 2048);

/// Square with corners 1+i, -1+i, -1-i, 1-i minus the slit [-1/2, 1/2].
/// The slit runs left to right, so its plus face looks up.
PlanarDomain example1();

/// Half-disc of radius R standing in for the upper half-plane. The diameter
/// carries vertices at -1 and 1 so [-1, 1] is an exact parameter interval.
PlanarDomain half_disc(double radius = 10.0, std::size_t arc_vertices = 2048);

/// Outer-curve arc of a unit_disc() between angles a < b (b - a <= 2π).
BoundaryArc disc_arc(const PlanarDomain& disc, double a, double b);

/// Arc on the Example-1 slit between x0 < x1.
BoundaryArc slit_arc(double x0, double x1, Side side);

/// Interval [x0, x1] of the real axis on a half_disc() diameter.
BoundaryArc diameter_arc(const PlanarDomain& half_disc, double x0, double x1);

/// Example 2: D = example1() with A = both faces of (-1/4, 1/4), G = unit
/// disc with B = its whole boundary.
CrossSpec example2();

/// Unit disc times unit disc with A = B = upper half circle.
CrossSpec half_arc_cross();

}  // namespace crossenv::fixtures
