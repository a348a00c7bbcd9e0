#include "crossenv/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crossenv/error.hpp"

namespace crossenv {

double closest_param(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return 0.0;
  return std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
}

double distance_to_segment(Point p, Point a, Point b) {
  const double s = closest_param(p, a, b);
  return std::abs(p - (a + s * (b - a)));
}

std::optional<SegmentHit> first_contact(Point p, Point q, Point a, Point b) {
  const Point r = q - p;
  const Point e = b - a;
  const double denom = cross(r, e);
  const double scale = std::max(std::norm(r), std::norm(e));
  if (std::abs(denom) > 1e-14 * scale) {
    const Point w = a - p;
    const double s = cross(w, e) / denom;
    const double u = cross(w, r) / denom;
    constexpr double kSlack = 1e-12;
    if (s < -kSlack || s > 1.0 + kSlack || u < -kSlack || u > 1.0 + kSlack) return std::nullopt;
    return SegmentHit{std::clamp(s, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
  }
  // Parallel: contact only if collinear.
  const double offset = std::abs(cross(a - p, r));
  if (offset > 1e-12 * std::sqrt(scale) * std::sqrt(std::norm(r))) return std::nullopt;
  const double rr = std::norm(r);
  if (rr == 0.0) return std::nullopt;
  double sa = dot(a - p, r) / rr;
  double sb = dot(b - p, r) / rr;
  const double lo = std::max(0.0, std::min(sa, sb));
  const double hi = std::min(1.0, std::max(sa, sb));
  if (lo > hi + 1e-12) return std::nullopt;
  const double s = std::clamp(lo, 0.0, 1.0);
  const Point hit = p + s * r;
  const double ee = std::norm(e);
  const double u = ee > 0.0 ? std::clamp(dot(hit - a, e) / ee, 0.0, 1.0) : 0.0;
  return SegmentHit{s, u};
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  return first_contact(a, b, c, d).has_value();
}

bool point_in_polygon(Point p, std::span<const Point> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = polygon[i];
    const Point b = polygon[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

double signed_area(std::span<const Point> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

std::vector<Point> circle_vertices(Point center, double radius, std::size_t n, double phase) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    out.push_back(center + std::polar(radius, angle));
  }
  return out;
}

Curve::Curve(std::vector<Point> vertices, bool closed) : vertices_(std::move(vertices)), closed_(closed) {
  const std::size_t min_count = closed_ ? 3 : 2;
  if (vertices_.size() < min_count) {
    fail(ErrorCode::invalid_curve, "curve needs at least " + std::to_string(min_count) + " vertices");
  }
  if (closed_ && vertices_.front() == vertices_.back()) vertices_.pop_back();
  if (vertices_.size() < min_count) fail(ErrorCode::invalid_curve, "closed curve collapses");
  cumulative_.assign(1, 0.0);
  const std::size_t segs = segment_count();
  cumulative_.reserve(segs + 1);
  for (std::size_t i = 0; i < segs; ++i) {
    const auto [a, b] = segment(i);
    const double len = std::abs(b - a);
    if (len == 0.0) fail(ErrorCode::invalid_curve, "consecutive vertices coincide at index " + std::to_string(i));
    cumulative_.push_back(cumulative_.back() + len);
  }
}

std::pair<Point, Point> Curve::segment(std::size_t i) const {
  return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
}

double Curve::normalize(double t) const {
  const double len = length();
  if (closed_) {
    double r = std::fmod(t, len);
    if (r < 0.0) r += len;
    if (r >= len) r = 0.0;
    return r;
  }
  return std::clamp(t, 0.0, len);
}

std::size_t Curve::segment_at(double t) const {
  const double tn = normalize(t);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), tn);
  std::size_t idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, segment_count() - 1);
}

Point Curve::point_at(double t) const {
  const double tn = normalize(t);
  const std::size_t i = segment_at(tn);
  const auto [a, b] = segment(i);
  const double f = (tn - cumulative_[i]) / segment_length(i);
  return a + std::clamp(f, 0.0, 1.0) * (b - a);
}

Point Curve::tangent_at(double t) const {
  const auto [a, b] = segment(segment_at(t));
  return (b - a) / std::abs(b - a);
}

std::vector<Point> Curve::sample(double t0, double t1) const {
  std::vector<Point> out;
  if (!(t1 > t0)) return out;
  out.push_back(point_at(t0));
  const double len = length();
  if (closed_) {
    const double m0 = std::floor(t0 / len);
    for (int m = 0; m < 3; ++m) {
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const double tv = (m0 + m) * len + cumulative_[i];
        if (tv > t0 + 1e-12 && tv < t1 - 1e-12) out.push_back(vertices_[i]);
      }
    }
  } else {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (cumulative_[i] > t0 + 1e-12 && cumulative_[i] < t1 - 1e-12) out.push_back(vertices_[i]);
    }
  }
  out.push_back(point_at(t1));
  return out;
}

double Curve::signed_area() const {
  if (!closed_) return 0.0;
  return crossenv::signed_area(vertices_);
}

namespace {

struct Seg {
  Point a, b;
  double xmin, xmax;
  std::size_t index;
};

std::vector<Seg> segments_of(const Curve& c) {
  std::vector<Seg> segs;
  segs.reserve(c.segment_count());
  for (std::size_t i = 0; i < c.segment_count(); ++i) {
    const auto [a, b] = c.segment(i);
    segs.push_back({a, b, std::min(a.real(), b.real()), std::max(a.real(), b.real()), i});
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& l, const Seg& r) { return l.xmin < r.xmin; });
  return segs;
}

bool adjacent(const Curve& c, std::size_t i, std::size_t j) {
  const std::size_t n = c.segment_count();
  if (i == j) return true;
  if (i + 1 == j || j + 1 == i) return true;
  if (c.closed() && ((i == 0 && j == n - 1) || (j == 0 && i == n - 1))) return true;
  return false;
}

}  // namespace

bool Curve::is_simple() const {
  const auto segs = segments_of(*this);
  for (std::size_t p = 0; p < segs.size(); ++p) {
    for (std::size_t q = p + 1; q < segs.size() && segs[q].xmin <= segs[p].xmax; ++q) {
      const Seg& s = segs[p];
      const Seg& r = segs[q];
      if (std::max(std::min(s.a.imag(), s.b.imag()), std::min(r.a.imag(), r.b.imag())) >
          std::min(std::max(s.a.imag(), s.b.imag()), std::max(r.a.imag(), r.b.imag())))
        continue;
      if (adjacent(*this, s.index, r.index)) {
        // Adjacent segments share a vertex; only a fold back onto itself overlaps further.
        const Point d1 = s.b - s.a;
        const Point d2 = r.b - r.a;
        const bool collinear = std::abs(cross(d1, d2)) <= 1e-14 * std::abs(d1) * std::abs(d2);
        if (collinear && dot(d1, d2) < 0.0) return false;
        continue;
      }
      if (segments_touch(s.a, s.b, r.a, r.b)) return false;
    }
  }
  return true;
}

Curve Curve::reversed() const {
  std::vector<Point> v(vertices_.rbegin(), vertices_.rend());
  return Curve(std::move(v), closed_);
}

bool polylines_intersect(const Curve& a, const Curve& b) {
  const auto sa = segments_of(a);
  const auto sb = segments_of(b);
  for (const Seg& s : sa) {
    for (const Seg& r : sb) {
      if (r.xmin > s.xmax) break;
      if (r.xmax < s.xmin) continue;
      if (segments_touch(s.a, s.b, r.a, r.b)) return true;
    }
  }
  return false;
}

}  // namespace crossenv
