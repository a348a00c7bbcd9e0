#include <algorithm>
#include <cmath>
#include <numbers>

#include "crossenv/construct.hpp"

namespace crossenv {

namespace {

constexpr Point kI{0.0, 1.0};

struct Frame {
  const PlanarDomain& domain;
  const Curve& curve;
  CurveId id;
  double sign;  // +1 when the domain lies left of the curve

  Point unit_normal(std::size_t segment) const {
    const auto [a, b] = curve.segment(segment);
    return -sign * kI * (b - a) / std::abs(b - a);
  }

  /// Bisector of the normals of the segments meeting at vertex i (the
  /// segment normal at the ends of an open curve).
  Point vertex_normal(std::size_t i) const {
    const std::size_t segs = curve.segment_count();
    if (!curve.closed() && i == 0) return unit_normal(0);
    if (!curve.closed() && i == segs) return unit_normal(segs - 1);
    const Point n = unit_normal(i % segs) + unit_normal((i + segs - 1) % segs);
    return n / std::abs(n);
  }

  /// Outward normal, interpolated linearly between the vertex bisectors so
  /// that offsets smaller than the local turning radius stay simple.
  Point normal(double t) const {
    const double tn = curve.normalize(t);
    const std::size_t i = curve.segment_at(tn);
    const double u = std::clamp((tn - curve.segment_start(i)) / curve.segment_length(i), 0.0, 1.0);
    const Point n = (1.0 - u) * vertex_normal(i) + u * vertex_normal(i + 1);
    return n / std::abs(n);
  }

  /// Free length along the ray from p in direction n, capped at `cap`.
  double clearance(Point p, Point n, double cap) const {
    const Point q = p + cap * n;
    const Point lo{std::min(p.real(), q.real()), std::min(p.imag(), q.imag())};
    const Point hi{std::max(p.real(), q.real()), std::max(p.imag(), q.imag())};
    std::vector<std::size_t> hits;
    domain.index().query_box(lo, hi, hits);
    double best = cap;
    for (std::size_t h : hits) {
      const auto& e = domain.index().entries()[h];
      const auto c = first_contact(p, q, e.a, e.b);
      if (c && c->s > 1e-9) best = std::min(best, c->s * cap);
    }
    return best;
  }
};

std::vector<double> base_params(const Curve& c, double t0, double t1, bool whole, double spacing) {
  const double len = whole ? c.length() : t1 - t0;
  const auto n = static_cast<std::size_t>(std::max(64.0, std::ceil(len / spacing)));
  std::vector<double> t;
  const std::size_t count = whole ? n : n + 1;
  for (std::size_t j = 0; j < count; ++j) t.push_back(t0 + len * static_cast<double>(j) / static_cast<double>(n));
  const double L = c.length();
  const std::size_t nv = c.vertices().size();
  for (int lap = 0; lap < 3; ++lap) {
    for (std::size_t i = 0; i < nv; ++i) {
      const double tv = c.segment_start(i) + (c.closed() ? lap * L : 0.0);
      if (whole ? (tv > t0 && tv < t0 + L) : (tv > t0 && tv < t1)) t.push_back(tv);
    }
    if (!c.closed()) break;
  }
  std::sort(t.begin(), t.end());
  const double eps = 1e-12 * L;
  t.erase(std::unique(t.begin(), t.end(), [eps](double a, double b) { return std::abs(a - b) <= eps; }), t.end());
  return t;
}

[[noreturn]] void no_clearance(const std::string& why) { fail(ErrorCode::no_clearance, why); }

}  // namespace

Point CompanionCurve::at(double t) const {
  const auto& g = offset.vertices();
  if (params.empty()) return {};
  if (closed) {
    const double period = base_period;
    double tn = std::fmod(t - params.front(), period);
    if (tn < 0.0) tn += period;
    tn += params.front();
    auto it = std::upper_bound(params.begin(), params.end(), tn);
    const std::size_t j = static_cast<std::size_t>(std::distance(params.begin(), it)) - 1;
    const double ta = params[j];
    const double tb = j + 1 < params.size() ? params[j + 1] : params.front() + period;
    const Point gb = j + 1 < params.size() ? g[j + 1] : g.front();
    return g[j] + (tn - ta) / (tb - ta) * (gb - g[j]);
  }
  const double tc = std::clamp(t, params.front(), params.back());
  auto it = std::upper_bound(params.begin(), params.end(), tc);
  std::size_t j = static_cast<std::size_t>(std::distance(params.begin(), it));
  j = std::clamp<std::size_t>(j, 1, params.size() - 1) - 1;
  return g[j] + (tc - params[j]) / (params[j + 1] - params[j]) * (g[j + 1] - g[j]);
}

double CompanionCurve::pocket_area() const {
  if (pocket.size() == 2) return std::abs(std::abs(pocket[0].signed_area()) - std::abs(pocket[1].signed_area()));
  return pocket.empty() ? 0.0 : std::abs(pocket[0].signed_area());
}

CompanionCurve build_companion(const PlanarDomain& domain, const BoundaryArc& arc, int k) {
  if (k < 1) fail(ErrorCode::config_error, "k must be positive");
  validate(domain, BoundarySet{{arc}});
  if (arc.curve.kind == CurveKind::slit) {
    fail(ErrorCode::type_mismatch, "arc on " + arc.curve.str() + " is of type 2; its companion is empty");
  }
  const Curve& c = domain.curve(arc.curve);
  const Frame frame{domain, c, arc.curve, domain.interior_on_left(arc.curve) ? 1.0 : -1.0};
  const double L = c.length();
  const bool whole = c.closed() && arc.t1 - arc.t0 >= L - 1e-9 * L;
  const double t0 = whole ? 0.0 : arc.t0;
  const double t1 = whole ? L : arc.t1;
  const double inv_k = 1.0 / k;
  const double spacing = std::min(0.25 * inv_k, (t1 - t0) / 64.0);
  const std::vector<double> params = base_params(c, t0, t1, whole, spacing);

  std::vector<Point> base, normals;
  std::vector<double> clear;
  for (double t : params) {
    base.push_back(c.point_at(t));
    normals.push_back(frame.normal(t));
    clear.push_back(frame.clearance(base.back(), normals.back(), inv_k));
  }
  const double min_clear = *std::min_element(clear.begin(), clear.end());
  if (min_clear < 0.25 * inv_k) {
    no_clearance("outward clearance " + std::to_string(min_clear) + " is below 1/(4k) on " + arc.curve.str());
  }

  CompanionCurve cc;
  cc.base_arc = arc;
  cc.k = k;
  cc.closed = whole;
  cc.params = params;
  cc.base_period = L;
  std::vector<Point> gamma(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) {
    double delta;
    if (whole) {
      delta = std::min(0.5 * inv_k, 0.5 * min_clear);
    } else {
      const double s = (params[j] - t0) / (t1 - t0);
      delta = std::min(0.5 * inv_k, 0.5 * clear[j]) * std::sin(std::numbers::pi * s);
      if (j == 0 || j + 1 == params.size()) delta = 0.0;
    }
    gamma[j] = base[j] + delta * normals[j];
    cc.sup_offset = std::max(cc.sup_offset, std::abs(gamma[j] - base[j]));
  }
  if (!whole) {
    gamma.front() = base.front();
    gamma.back() = base.back();
  }

  try {
    cc.offset = Curve(gamma, whole);
  } catch (const Error& e) {
    no_clearance(std::string("offset curve degenerates: ") + e.what());
  }
  cc.checks.endpoints_pinned = whole || (gamma.front() == c.point_at(t0) && gamma.back() == c.point_at(t1));
  cc.checks.offset_within = cc.sup_offset < inv_k;
  if (!cc.offset.is_simple()) no_clearance("offset curve is not simple");

  // Γ meets ∂D only at the pinned endpoints.
  const double pin_tol = 1e-12 * std::max(1.0, domain.diameter());
  for (std::size_t i = 0; i < cc.offset.segment_count(); ++i) {
    const auto [p, q] = cc.offset.segment(i);
    std::vector<std::size_t> hits;
    domain.index().query_box({std::min(p.real(), q.real()), std::min(p.imag(), q.imag())},
                             {std::max(p.real(), q.real()), std::max(p.imag(), q.imag())}, hits);
    for (std::size_t h : hits) {
      const auto& e = domain.index().entries()[h];
      const auto hit = first_contact(p, q, e.a, e.b);
      if (!hit) continue;
      const Point x = p + hit->s * (q - p);
      const bool pinned = !whole && (std::abs(x - gamma.front()) <= pin_tol || std::abs(x - gamma.back()) <= pin_tol);
      const bool pinned_segment = (i == 0 || i + 1 == cc.offset.segment_count());
      if (!(pinned && pinned_segment)) no_clearance("offset curve meets the boundary of the domain");
    }
  }

  bool disjoint = true;
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (!whole && (j == 0 || j + 1 == params.size())) continue;
    const Point mid = 0.5 * (base[j] + gamma[j]);
    if (domain.contains(gamma[j], 0.0) || domain.contains(mid, 0.0)) disjoint = false;
  }

  if (whole) {
    cc.pocket = {cc.offset, c};
  } else {
    std::vector<Point> ring = c.sample(t0, t1);
    for (std::size_t j = gamma.size() - 2; j >= 1; --j) ring.push_back(gamma[j]);
    try {
      cc.pocket = {Curve(std::move(ring), true)};
    } catch (const Error& e) {
      no_clearance(std::string("pocket degenerates: ") + e.what());
    }
    if (!cc.pocket.front().is_simple()) no_clearance("pocket boundary is not simple");
  }

  auto inside_pocket = [&](Point p) {
    if (whole) {
      const bool in_gamma = point_in_polygon(p, cc.offset.vertices());
      const bool in_base = point_in_polygon(p, c.vertices());
      return in_gamma != in_base;
    }
    return point_in_polygon(p, cc.pocket.front().vertices());
  };
  for (const CurveId id : domain.curve_ids()) {
    const Curve& other = domain.curve(id);
    for (std::size_t i = 0; i < other.vertices().size(); ++i) {
      if (id == arc.curve) {
        if (whole) continue;
        const double tv = other.segment_start(std::min(i, other.segment_count()));
        const double rel = std::fmod(tv - t0 + 2.0 * L, L);
        if (rel <= t1 - t0 + 1e-12 * L) continue;
      }
      if (inside_pocket(other.vertices()[i])) disjoint = false;
    }
  }
  cc.checks.pocket_disjoint = disjoint;
  if (!disjoint) no_clearance("pocket intersects the domain");
  return cc;
}

std::vector<BoundaryArc> components(const PlanarDomain& domain, const BoundarySet& set) {
  validate(domain, set);
  const SetIndicator ind(domain, set);
  std::vector<BoundaryArc> out;
  for (const CurveId id : domain.curve_ids()) {
    const Curve& c = domain.curve(id);
    auto iv = ind.intervals(id, Side::plus);
    if (id.kind == CurveKind::slit) {
      auto minus = ind.intervals(id, Side::minus);
      iv.insert(iv.end(), minus.begin(), minus.end());
      iv = merge_intervals(std::move(iv));
    }
    if (iv.empty()) continue;
    const double L = c.length();
    if (c.closed() && iv.size() > 1 && iv.front().first <= 1e-12 * L && iv.back().second >= L - 1e-12 * L) {
      iv.back().second = L + iv.front().second;
      iv.erase(iv.begin());
    }
    for (const auto& [a, b] : iv) out.push_back({id, a, b, Side::both});
  }
  return out;
}

namespace {

/// Replaces the listed arcs of a closed curve by their offset curves.
Curve splice(const Curve& c, std::vector<const CompanionCurve*> parts) {
  for (const CompanionCurve* p : parts) {
    if (p->closed) return p->offset;
  }
  std::sort(parts.begin(), parts.end(),
            [](const CompanionCurve* a, const CompanionCurve* b) { return a->base_arc.t0 < b->base_arc.t0; });
  const double L = c.length();
  std::vector<Point> v;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& g = parts[i]->offset.vertices();
    v.insert(v.end(), g.begin(), g.end() - 1);
    const double from = parts[i]->base_arc.t1;
    const double to = i + 1 < parts.size() ? parts[i + 1]->base_arc.t0 : parts[0]->base_arc.t0 + L;
    const auto gap = c.sample(from, to);
    if (!gap.empty()) v.insert(v.end(), gap.begin(), gap.end() - 1);
  }
  return Curve(std::move(v), true);
}

}  // namespace

DkResult build_Dk_detailed(const PlanarDomain& domain, const BoundarySet& Ak, int k) {
  const auto comps = components(domain, Ak);
  DkResult result;
  result.k = k;
  for (const BoundaryArc& arc : comps) {
    if (arc.curve.kind == CurveKind::slit) {
      result.welded.push_back(arc);
    } else {
      result.companions.push_back(build_companion(domain, arc, k));
    }
  }
  auto parts_on = [&](CurveId id) {
    std::vector<const CompanionCurve*> parts;
    for (const auto& cc : result.companions) {
      if (cc.base_arc.curve == id) parts.push_back(&cc);
    }
    return parts;
  };
  try {
    const CurveId outer_id{CurveKind::outer, 0};
    auto outer_parts = parts_on(outer_id);
    Curve outer = outer_parts.empty() ? domain.outer() : splice(domain.outer(), outer_parts);
    std::vector<Curve> holes;
    for (std::size_t i = 0; i < domain.holes().size(); ++i) {
      auto parts = parts_on({CurveKind::hole, i});
      holes.push_back(parts.empty() ? domain.holes()[i] : splice(domain.holes()[i], parts));
    }
    std::vector<Curve> slits;
    for (std::size_t i = 0; i < domain.slits().size(); ++i) {
      const CurveId id{CurveKind::slit, i};
      const Curve& s = domain.slits()[i];
      const double L = s.length();
      double from = 0.0;
      auto keep = [&](double a, double b) {
        if (b - a > 1e-12 * L) slits.emplace_back(s.sample(a, b), false);
      };
      for (const BoundaryArc& w : result.welded) {
        if (w.curve != id) continue;
        keep(from, w.t0);
        from = w.t1;
      }
      keep(from, L);
    }
    result.domain = PlanarDomain(std::move(outer), std::move(holes), std::move(slits));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::no_clearance) throw;
    no_clearance(std::string("assembling D_k failed: ") + e.what());
  }
  return result;
}

PlanarDomain build_Dk(const PlanarDomain& domain, const BoundarySet& Ak, int k) {
  return build_Dk_detailed(domain, Ak, k).domain;
}

}  // namespace crossenv
