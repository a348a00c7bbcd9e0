#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace crossenv {

/// Points of the plane are complex numbers, matching the complex-analytic
/// setting the toolkit works in.
using Point = std::complex<double>;

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Parameter s in [0, 1] of the point of segment [a, b] closest to p.
double closest_param(Point p, Point a, Point b);

double distance_to_segment(Point p, Point a, Point b);

struct SegmentHit {
  double s;  // parameter along the query segment [p, q]
  double u;  // parameter along the target segment [a, b]
};

/// First contact of the segment [p, q] with [a, b], measured from p. Touching
/// and collinear overlap count as contact; for overlaps the contact nearest
/// to p is returned.
std::optional<SegmentHit> first_contact(Point p, Point q, Point a, Point b);

/// True when the closed segments [a, b] and [c, d] share a point.
bool segments_touch(Point a, Point b, Point c, Point d);

/// Even-odd containment test for the polygon with the given vertices.
bool point_in_polygon(Point p, std::span<const Point> polygon);

double signed_area(std::span<const Point> polygon);

/// Vertices of a regular n-gon inscribed in the circle |z - center| = radius,
/// counter-clockwise, starting at angle `phase`.
std::vector<Point> circle_vertices(Point center, double radius, std::size_t n, double phase = 0.0);

/// A simple polyline, open or closed, parametrised by arc length.
class Curve {
 public:
  Curve() = default;
  /// Throws invalid_curve when the vertex count is too small or two
  /// consecutive vertices coincide. Simplicity is checked separately via
  /// is_simple() because it is quadratic in the worst case.
  Curve(std::vector<Point> vertices, bool closed);

  const std::vector<Point>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  std::size_t segment_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }
  std::pair<Point, Point> segment(std::size_t i) const;
  double segment_start(std::size_t i) const { return cumulative_[i]; }
  double segment_length(std::size_t i) const { return cumulative_[i + 1] - cumulative_[i]; }
  double length() const { return cumulative_.back(); }

  /// Reduces t into [0, length) for closed curves and clamps for open ones.
  double normalize(double t) const;
  std::size_t segment_at(double t) const;
  Point point_at(double t) const;
  Point tangent_at(double t) const;

  /// The sub-polyline between parameters t0 < t1 (t1 may exceed length()
  /// on closed curves to wrap past the seam), including interior vertices.
  std::vector<Point> sample(double t0, double t1) const;

  /// Counter-clockwise area for closed curves, 0 for open ones.
  double signed_area() const;
  bool is_simple() const;
  Curve reversed() const;

 private:
  std::vector<Point> vertices_;
  bool closed_ = false;
  std::vector<double> cumulative_{0.0};
};

/// Non-adjacent segment pairs of the polylines that touch; used for the
/// simplicity and disjointness checks of domains.
bool polylines_intersect(const Curve& a, const Curve& b);

}  // namespace crossenv
