#include "crossenv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crossenv/error.hpp"

namespace crossenv {

namespace {

constexpr double kParamSlack = 1e-12;

double curve_distance(const Curve& c, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.segment_count(); ++i) {
    const auto [a, b] = c.segment(i);
    best = std::min(best, distance_to_segment(p, a, b));
  }
  return best;
}

double polyline_gap(const Curve& a, const Curve& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : a.vertices()) best = std::min(best, curve_distance(b, p));
  for (const Point& p : b.vertices()) best = std::min(best, curve_distance(a, p));
  return best;
}

bool inside_curve(const Curve& closed, Point p) { return point_in_polygon(p, closed.vertices()); }

}  // namespace

std::string CurveId::str() const {
  switch (kind) {
    case CurveKind::outer: return "outer";
    case CurveKind::hole: return "hole:" + std::to_string(index);
    case CurveKind::slit: return "slit:" + std::to_string(index);
  }
  return "?";
}

CurveId CurveId::parse(const std::string& text) {
  if (text == "outer") return {CurveKind::outer, 0};
  auto parse_index = [&](std::size_t prefix) -> std::size_t {
    const std::string digits = text.substr(prefix);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::invalid_set, "bad curve reference '" + text + "'");
    }
    return static_cast<std::size_t>(std::stoul(digits));
  };
  if (text.rfind("hole:", 0) == 0) return {CurveKind::hole, parse_index(5)};
  if (text.rfind("slit:", 0) == 0) return {CurveKind::slit, parse_index(5)};
  fail(ErrorCode::invalid_set, "bad curve reference '" + text + "'");
}

std::string to_string(Side side) {
  switch (side) {
    case Side::both: return "both";
    case Side::plus: return "plus";
    case Side::minus: return "minus";
  }
  return "?";
}

Side parse_side(const std::string& text) {
  if (text == "both") return Side::both;
  if (text == "plus") return Side::plus;
  if (text == "minus") return Side::minus;
  fail(ErrorCode::invalid_set, "bad side '" + text + "'");
}

PlanarDomain::PlanarDomain(Curve outer, std::vector<Curve> holes, std::vector<Curve> slits)
    : outer_(std::move(outer)), holes_(std::move(holes)), slits_(std::move(slits)) {
  if (!outer_.closed()) fail(ErrorCode::invalid_domain, "outer curve must be closed");
  if (!outer_.is_simple()) fail(ErrorCode::invalid_domain, "outer curve is not simple");
  if (outer_.signed_area() <= 0.0) fail(ErrorCode::invalid_domain, "outer curve must be positively oriented");

  for (std::size_t i = 0; i < holes_.size(); ++i) {
    const Curve& h = holes_[i];
    if (!h.closed()) fail(ErrorCode::invalid_domain, "hole " + std::to_string(i) + " must be closed");
    if (!h.is_simple()) fail(ErrorCode::invalid_domain, "hole " + std::to_string(i) + " is not simple");
    if (!inside_curve(outer_, h.vertices().front()) || polylines_intersect(outer_, h)) {
      fail(ErrorCode::invalid_domain, "hole " + std::to_string(i) + " is not interior to the outer curve");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (polylines_intersect(holes_[j], h) || inside_curve(holes_[j], h.vertices().front()) ||
          inside_curve(h, holes_[j].vertices().front())) {
        fail(ErrorCode::invalid_domain, "holes " + std::to_string(j) + " and " + std::to_string(i) + " meet");
      }
    }
    hole_ccw_.push_back(h.signed_area() > 0.0);
  }
  for (std::size_t i = 0; i < slits_.size(); ++i) {
    const Curve& s = slits_[i];
    const std::string name = "slit " + std::to_string(i);
    if (s.closed()) fail(ErrorCode::invalid_domain, name + " must be an open polyline");
    if (!s.is_simple()) fail(ErrorCode::invalid_domain, name + " is not simple");
    if (!inside_curve(outer_, s.vertices().front()) || polylines_intersect(outer_, s)) {
      fail(ErrorCode::invalid_domain, name + " is not interior to the outer curve");
    }
    for (const Curve& h : holes_) {
      if (polylines_intersect(h, s) || inside_curve(h, s.vertices().front())) {
        fail(ErrorCode::invalid_domain, name + " meets a hole");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (polylines_intersect(slits_[j], s)) fail(ErrorCode::invalid_domain, name + " meets another slit");
    }
  }

  bbox_min_ = bbox_max_ = outer_.vertices().front();
  for (const Point& p : outer_.vertices()) {
    bbox_min_ = {std::min(bbox_min_.real(), p.real()), std::min(bbox_min_.imag(), p.imag())};
    bbox_max_ = {std::max(bbox_max_.real(), p.real()), std::max(bbox_max_.imag(), p.imag())};
  }

  std::vector<SegmentIndex::Entry> entries;
  const auto ids = curve_ids();
  for (std::size_t tag = 0; tag < ids.size(); ++tag) {
    const Curve& c = curve(ids[tag]);
    for (std::size_t i = 0; i < c.segment_count(); ++i) {
      const auto [a, b] = c.segment(i);
      entries.push_back({a, b, static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(i)});
    }
  }
  index_ = std::make_shared<const SegmentIndex>(std::move(entries));
}

std::vector<CurveId> PlanarDomain::curve_ids() const {
  std::vector<CurveId> ids{{CurveKind::outer, 0}};
  for (std::size_t i = 0; i < holes_.size(); ++i) ids.push_back({CurveKind::hole, i});
  for (std::size_t i = 0; i < slits_.size(); ++i) ids.push_back({CurveKind::slit, i});
  return ids;
}

bool PlanarDomain::has_curve(CurveId id) const {
  switch (id.kind) {
    case CurveKind::outer: return id.index == 0;
    case CurveKind::hole: return id.index < holes_.size();
    case CurveKind::slit: return id.index < slits_.size();
  }
  return false;
}

const Curve& PlanarDomain::curve(CurveId id) const {
  if (!has_curve(id)) fail(ErrorCode::invalid_set, "no curve " + id.str() + " in domain");
  switch (id.kind) {
    case CurveKind::outer: return outer_;
    case CurveKind::hole: return holes_[id.index];
    case CurveKind::slit: return slits_[id.index];
  }
  return outer_;
}

bool PlanarDomain::interior_on_left(CurveId id) const {
  if (id.kind == CurveKind::outer) return true;
  if (id.kind == CurveKind::hole) return !hole_ccw_.at(id.index);
  return true;
}

CurveId PlanarDomain::curve_of_tag(std::uint32_t tag) const {
  if (tag == 0) return {CurveKind::outer, 0};
  if (tag <= holes_.size()) return {CurveKind::hole, tag - 1};
  return {CurveKind::slit, tag - 1 - holes_.size()};
}

std::uint32_t PlanarDomain::tag_of(CurveId id) const {
  switch (id.kind) {
    case CurveKind::outer: return 0;
    case CurveKind::hole: return static_cast<std::uint32_t>(1 + id.index);
    case CurveKind::slit: return static_cast<std::uint32_t>(1 + holes_.size() + id.index);
  }
  return 0;
}

bool PlanarDomain::contains(Point z, double eps) const {
  if (!inside_curve(outer_, z)) return false;
  for (const Curve& h : holes_) {
    if (inside_curve(h, z)) return false;
  }
  return index_->distance(z) > eps;
}

double PlanarDomain::area() const {
  double a = std::abs(outer_.signed_area());
  for (const Curve& h : holes_) a -= std::abs(h.signed_area());
  return a;
}

double PlanarDomain::diameter() const {
  const auto& v = outer_.vertices();
  double best = 0.0;
  const std::size_t step = v.size() > 4096 ? v.size() / 4096 + 1 : 1;
  for (std::size_t i = 0; i < v.size(); i += step) {
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, std::abs(v[i] - v[j]));
  }
  return best;
}

double PlanarDomain::min_slit_clearance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < slits_.size(); ++i) {
    best = std::min(best, polyline_gap(slits_[i], outer_));
    for (const Curve& h : holes_) best = std::min(best, polyline_gap(slits_[i], h));
    for (std::size_t j = i + 1; j < slits_.size(); ++j) best = std::min(best, polyline_gap(slits_[i], slits_[j]));
  }
  return best;
}

std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> v, double join_gap) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second + join_gap) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

namespace {

/// Unwrapped pieces of one arc inside [0, length].
std::vector<std::pair<double, double>> unwrap(const Curve& c, double t0, double t1) {
  const double len = c.length();
  if (!c.closed()) return {{std::max(0.0, t0), std::min(len, t1)}};
  if (t1 - t0 >= len - kParamSlack) return {{0.0, len}};
  double a = std::fmod(t0, len);
  if (a < 0.0) a += len;
  const double b = a + (t1 - t0);
  if (b <= len) return {{a, b}};
  return {{a, len}, {0.0, b - len}};
}

std::vector<Side> faces_of(const BoundaryArc& arc) {
  if (arc.curve.kind != CurveKind::slit) return {Side::plus};
  if (arc.side == Side::both) return {Side::plus, Side::minus};
  return {arc.side};
}

}  // namespace

void validate(const PlanarDomain& domain, const BoundarySet& set) {
  std::vector<std::vector<std::pair<double, double>>> per_face;
  const auto ids = domain.curve_ids();
  per_face.resize(2 * ids.size());
  for (const BoundaryArc& arc : set.arcs) {
    if (!domain.has_curve(arc.curve)) fail(ErrorCode::invalid_set, "arc refers to missing curve " + arc.curve.str());
    const Curve& c = domain.curve(arc.curve);
    const double len = c.length();
    if (!(arc.t1 > arc.t0)) fail(ErrorCode::invalid_set, "empty parameter interval on " + arc.curve.str());
    if (c.closed()) {
      if (arc.t0 < -kParamSlack || arc.t0 > len + kParamSlack || arc.t1 > arc.t0 + len + kParamSlack) {
        fail(ErrorCode::invalid_set, "interval outside closed curve " + arc.curve.str());
      }
    } else if (arc.t0 < -kParamSlack || arc.t1 > len + kParamSlack) {
      fail(ErrorCode::invalid_set, "interval outside curve " + arc.curve.str());
    }
    if (arc.curve.kind != CurveKind::slit && arc.side != Side::both) {
      fail(ErrorCode::invalid_set, "faces are only defined on slits, got " + to_string(arc.side) + " on " +
                                       arc.curve.str());
    }
    const std::size_t tag = domain.tag_of(arc.curve);
    for (Side face : faces_of(arc)) {
      auto& bucket = per_face[2 * tag + (face == Side::minus ? 1 : 0)];
      for (const auto& piece : unwrap(c, arc.t0, arc.t1)) bucket.push_back(piece);
    }
  }
  for (auto& bucket : per_face) {
    std::sort(bucket.begin(), bucket.end());
    for (std::size_t i = 1; i < bucket.size(); ++i) {
      if (bucket[i].first < bucket[i - 1].second - kParamSlack) {
        fail(ErrorCode::invalid_set, "arcs overlap");
      }
    }
  }
}

double arc_length(const BoundarySet& set) {
  double total = 0.0;
  for (const BoundaryArc& arc : set.arcs) {
    const double mult = (arc.curve.kind == CurveKind::slit && arc.side == Side::both) ? 2.0 : 1.0;
    total += mult * std::max(0.0, arc.t1 - arc.t0);
  }
  return total;
}

SetIndicator::SetIndicator(const PlanarDomain& domain, const BoundarySet& set) : ids_(domain.curve_ids()) {
  intervals_.resize(2 * ids_.size());
  for (const CurveId id : ids_) {
    lengths_.push_back(domain.curve(id).length());
    closed_.push_back(domain.curve(id).closed());
  }
  for (const BoundaryArc& arc : set.arcs) {
    const Curve& c = domain.curve(arc.curve);
    const std::size_t tag = domain.tag_of(arc.curve);
    for (Side face : faces_of(arc)) {
      auto& bucket = intervals_[2 * tag + (face == Side::minus ? 1 : 0)];
      for (const auto& piece : unwrap(c, arc.t0, arc.t1)) bucket.push_back(piece);
    }
  }
  for (auto& bucket : intervals_) bucket = merge_intervals(std::move(bucket));
}

std::size_t SetIndicator::slot(CurveId curve, Side face) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), curve);
  if (it == ids_.end() || *it != curve) fail(ErrorCode::invalid_set, "unknown curve " + curve.str());
  const auto tag = static_cast<std::size_t>(std::distance(ids_.begin(), it));
  const bool minus = curve.kind == CurveKind::slit && face == Side::minus;
  return 2 * tag + (minus ? 1 : 0);
}

const std::vector<std::pair<double, double>>& SetIndicator::intervals(CurveId curve, Side face) const {
  return intervals_[slot(curve, face)];
}

bool SetIndicator::contains(CurveId curve, double t, Side face) const {
  if (curve.kind == CurveKind::slit && face == Side::both) {
    return contains(curve, t, Side::plus) && contains(curve, t, Side::minus);
  }
  const auto& iv = intervals_[slot(curve, face)];
  auto it = std::upper_bound(iv.begin(), iv.end(), std::make_pair(t, std::numeric_limits<double>::infinity()));
  if (it == iv.begin()) return false;
  --it;
  return t >= it->first && t <= it->second;
}

double SetIndicator::coverage(CurveId curve, double t, double width, Side face) const {
  if (curve.kind == CurveKind::slit && face == Side::both) {
    return 0.5 * (coverage(curve, t, width, Side::plus) + coverage(curve, t, width, Side::minus));
  }
  const std::size_t s = slot(curve, face);
  if (!(width > 0.0)) return contains(curve, t, face) ? 1.0 : 0.0;
  const double len = lengths_[s / 2];
  double lo = t - 0.5 * width, hi = t + 0.5 * width;
  if (!closed_[s / 2]) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, len);
    if (hi <= lo) return contains(curve, t, face) ? 1.0 : 0.0;
  }
  double covered = 0.0;
  for (const auto& [a, b] : intervals_[s]) {
    for (int shift = -1; shift <= 1; ++shift) {
      if (shift != 0 && !closed_[s / 2]) continue;
      const double off = shift * len;
      covered += std::max(0.0, std::min(hi, b + off) - std::max(lo, a + off));
    }
  }
  return std::min(1.0, covered / (hi - lo));
}

PointType classify_point(const PlanarDomain& domain, Point zeta, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_input, "classification tolerance must be positive");
  std::vector<std::size_t> hits;
  domain.index().query_box(zeta - Point(tol, tol), zeta + Point(tol, tol), hits);
  std::vector<std::uint32_t> tags;
  for (std::size_t h : hits) {
    const auto& e = domain.index().entries()[h];
    if (distance_to_segment(zeta, e.a, e.b) <= tol) tags.push_back(e.tag);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  if (tags.empty()) return PointType::not_boundary;
  if (tags.size() > 1) fail(ErrorCode::ambiguous_point, "point is within tolerance of two boundary pieces");
  const CurveId id = domain.curve_of_tag(tags.front());
  if (id.kind != CurveKind::slit) return PointType::type1;
  const Curve& s = domain.curve(id);
  if (std::abs(zeta - s.vertices().front()) <= tol || std::abs(zeta - s.vertices().back()) <= tol) {
    fail(ErrorCode::ambiguous_point, "point is within tolerance of a slit endpoint");
  }
  return PointType::type2;
}

BoundaryLocation nearest_boundary(const PlanarDomain& domain, Point z) {
  const auto n = domain.index().nearest(z);
  const auto& e = domain.index().entries()[n.entry];
  BoundaryLocation loc;
  loc.distance = n.distance;
  loc.curve = domain.curve_of_tag(e.tag);
  const Curve& c = domain.curve(loc.curve);
  loc.t = c.segment_start(e.segment) + n.s * c.segment_length(e.segment);
  loc.foot = e.a + n.s * (e.b - e.a);
  if (loc.curve.kind == CurveKind::slit) {
    loc.side = cross(e.b - e.a, z - loc.foot) >= 0.0 ? Side::plus : Side::minus;
  }
  return loc;
}

namespace {

std::vector<std::pair<double, double>> intersect_intervals(const std::vector<std::pair<double, double>>& a,
                                                           const std::vector<std::pair<double, double>>& b) {
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) out.emplace_back(lo, hi);
    if (a[i].second < b[j].second) ++i; else ++j;
  }
  return out;
}

std::vector<std::pair<double, double>> subtract_intervals(const std::vector<std::pair<double, double>>& a,
                                                          const std::vector<std::pair<double, double>>& b) {
  std::vector<std::pair<double, double>> out;
  for (auto piece : a) {
    double lo = piece.first;
    for (const auto& cut : b) {
      if (cut.second <= lo || cut.first >= piece.second) continue;
      if (cut.first > lo) out.emplace_back(lo, cut.first);
      lo = std::max(lo, cut.second);
    }
    if (piece.second > lo) out.emplace_back(lo, piece.second);
  }
  return out;
}

/// Re-emits per-face interval lists of one curve as arcs, rejoining pieces
/// across the seam of closed curves and using `both` where slit faces agree.
void emit_arcs(const Curve& c, CurveId id, const std::vector<std::pair<double, double>>& plus,
               const std::vector<std::pair<double, double>>& minus, BoundarySet& out) {
  auto emit = [&](std::vector<std::pair<double, double>> iv, Side side) {
    if (iv.empty()) return;
    const double len = c.length();
    if (c.closed() && iv.size() > 1 && iv.front().first <= kParamSlack && iv.back().second >= len - kParamSlack) {
      iv.back().second = len + iv.front().second;
      iv.erase(iv.begin());
    }
    for (const auto& [a, b] : iv) out.arcs.push_back({id, a, b, side});
  };
  if (id.kind != CurveKind::slit) {
    emit(plus, Side::both);
    return;
  }
  const auto common = intersect_intervals(plus, minus);
  emit(common, Side::both);
  emit(subtract_intervals(plus, common), Side::plus);
  emit(subtract_intervals(minus, common), Side::minus);
}

}  // namespace

BoundarySet find_extendible_points(const PlanarDomain& domain, const BoundarySet& set, double tol_len) {
  validate(domain, set);
  if (tol_len < 0.0) fail(ErrorCode::invalid_input, "tol_len must be nonnegative");
  const SetIndicator ind(domain, set);
  BoundarySet out;
  for (std::size_t i = 0; i < domain.slits().size(); ++i) {
    const CurveId id{CurveKind::slit, i};
    const auto covered = intersect_intervals(ind.intervals(id, Side::plus), ind.intervals(id, Side::minus));
    for (const auto& [a, b] : covered) {
      if (b - a > tol_len) out.arcs.push_back({id, a, b, Side::both});
    }
  }
  return out;
}

std::vector<Point> arc_polyline(const PlanarDomain& domain, const BoundaryArc& arc) {
  return domain.curve(arc.curve).sample(arc.t0, arc.t1);
}

BoundarySet widen(const PlanarDomain& domain, const BoundarySet& set, double pad) {
  validate(domain, set);
  BoundarySet grown;
  for (const BoundaryArc& arc : set.arcs) {
    const Curve& c = domain.curve(arc.curve);
    const double len = c.length();
    BoundaryArc g = arc;
    if (c.closed()) {
      if (arc.t1 - arc.t0 + 2.0 * pad >= len) {
        g.t0 = 0.0;
        g.t1 = len;
      } else {
        g.t0 = arc.t0 - pad;
        g.t1 = arc.t1 + pad;
        if (g.t0 < 0.0) {
          g.t0 += len;
          g.t1 += len;
        }
      }
    } else {
      g.t0 = std::max(0.0, arc.t0 - pad);
      g.t1 = std::min(len, arc.t1 + pad);
    }
    grown.arcs.push_back(g);
  }
  // Merge overlaps per face.
  std::vector<std::vector<std::pair<double, double>>> per_face(2 * domain.curve_ids().size());
  for (const BoundaryArc& arc : grown.arcs) {
    const Curve& c = domain.curve(arc.curve);
    const std::size_t tag = domain.tag_of(arc.curve);
    for (Side face : faces_of(arc)) {
      for (const auto& piece : unwrap(c, arc.t0, arc.t1)) {
        per_face[2 * tag + (face == Side::minus ? 1 : 0)].push_back(piece);
      }
    }
  }
  BoundarySet out;
  const auto ids = domain.curve_ids();
  for (std::size_t tag = 0; tag < ids.size(); ++tag) {
    emit_arcs(domain.curve(ids[tag]), ids[tag], merge_intervals(per_face[2 * tag]),
              merge_intervals(per_face[2 * tag + 1]), out);
  }
  return out;
}

bool set_contains(const PlanarDomain& domain, const BoundarySet& outer, const BoundarySet& inner, double eps) {
  const SetIndicator big(domain, outer);
  const SetIndicator small(domain, inner);
  for (const CurveId id : domain.curve_ids()) {
    for (Side face : {Side::plus, Side::minus}) {
      if (face == Side::minus && id.kind != CurveKind::slit) continue;
      const auto& have = big.intervals(id, face);
      for (const auto& [a, b] : small.intervals(id, face)) {
        const bool covered = std::any_of(have.begin(), have.end(), [&](const auto& iv) {
          return iv.first <= a + eps && iv.second >= b - eps;
        });
        if (!covered) return false;
      }
    }
  }
  return true;
}

BoundarySet whole_boundary(const PlanarDomain& domain) {
  BoundarySet out;
  for (const CurveId id : domain.curve_ids()) out.arcs.push_back({id, 0.0, domain.curve(id).length(), Side::both});
  return out;
}

std::optional<CircleInfo> detect_circle(const PlanarDomain& domain) {
  if (!domain.holes().empty() || !domain.slits().empty()) return std::nullopt;
  const auto& v = domain.outer().vertices();
  const std::size_t n = v.size();
  if (n < 16) return std::nullopt;
  Point center{0.0, 0.0};
  for (const Point& p : v) center += p;
  center /= static_cast<double>(n);
  double radius = 0.0;
  for (const Point& p : v) radius += std::abs(p - center);
  radius /= static_cast<double>(n);
  const double phase = std::arg(v.front() - center);
  for (std::size_t i = 0; i < n; ++i) {
    const Point expected =
        center + std::polar(radius, phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    if (std::abs(v[i] - expected) > 1e-9 * radius) return std::nullopt;
  }
  return CircleInfo{center, radius, phase, n};
}

double circle_angle(const CircleInfo& info, const Curve& outer, double t) {
  const double frac = t / outer.length();
  return info.phase + 2.0 * std::numbers::pi * frac;
}

double circle_param(const CircleInfo& info, const Curve& outer, double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle - info.phase, two_pi);
  if (a < 0.0) a += two_pi;
  return a / two_pi * outer.length();
}

}  // namespace crossenv
