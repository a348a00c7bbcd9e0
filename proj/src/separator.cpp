#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "crossenv/construct.hpp"

namespace crossenv {

std::string to_string(WitnessKind kind) {
  return kind == WitnessKind::cross_envelope_k ? "cross_envelope_k" : "product_k";
}

json SeparatorWitness::to_json() const {
  return {{"kind", to_string(kind)},
          {"k", k},
          {"point", {{"z", point_to_json(z)}, {"w", point_to_json(w)}}},
          {"residual", boundary_residual},
          {"route", route}};
}

NoWitness::NoWitness(const std::string& what, json diagnostics)
    : Error(ErrorCode::no_witness, what), diagnostics_(std::move(diagnostics)) {}

namespace {

struct Pair {
  Point z, w;
};

double dist2(const Pair& a, const Pair& b) { return std::norm(a.z - b.z) + std::norm(a.w - b.w); }

/// True when the straight segment stays off the boundary of the domain.
bool segment_clear(const PlanarDomain& domain, Point p, Point q) {
  std::vector<std::size_t> hits;
  domain.index().query_box({std::min(p.real(), q.real()), std::min(p.imag(), q.imag())},
                           {std::max(p.real(), q.real()), std::max(p.imag(), q.imag())}, hits);
  for (std::size_t h : hits) {
    const auto& e = domain.index().entries()[h];
    if (first_contact(p, q, e.a, e.b)) return false;
  }
  return true;
}

/// Points of the 4-ball around the query that lie in D x G.
std::vector<Pair> probes(const CrossSpec& spec, const SeparatorQuery& q, int count, std::uint64_t seed) {
  std::vector<Pair> out;
  const Pair centre{q.z0, q.w0};
  auto admissible = [&](const Pair& p) { return spec.D.contains(p.z) && spec.G.contains(p.w); };
  if (admissible(centre)) out.push_back(centre);
  const double r = 0.999 * q.radius;
  for (int axis = 0; axis < 4; ++axis) {
    for (double sgn : {-1.0, 1.0}) {
      Pair p = centre;
      const double d = sgn * r;
      if (axis == 0) p.z += Point(d, 0.0);
      if (axis == 1) p.z += Point(0.0, d);
      if (axis == 2) p.w += Point(d, 0.0);
      if (axis == 3) p.w += Point(0.0, d);
      if (admissible(p)) out.push_back(p);
    }
  }
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
  for (int tries = 0; static_cast<int>(out.size()) < count + 9 && tries < 64 * count; ++tries) {
    const double a = unit(), b = unit(), c = unit(), d = unit();
    if (a * a + b * b + c * c + d * d > 1.0) continue;
    const Pair p{q.z0 + r * Point(a, b), q.w0 + r * Point(c, d)};
    if (admissible(p)) out.push_back(p);
  }
  return out;
}

struct SideHit {
  Point point;
  double residual;
  std::string route;
};

/// Boundary case on one factor: a point of ∂D_k near z0 chosen as in the
/// proof (companion point over a type-1 piece, endpoint of the welded piece
/// for type 2). Returns the reason on failure.
std::optional<SideHit> boundary_case(const PlanarDomain& domain, const BoundarySet& set_k, int k, Point z0,
                                     double radius, std::string& reason) {
  const BoundaryLocation loc = nearest_boundary(domain, z0);
  if (loc.distance > radius) {
    reason = "no boundary point within the query radius";
    return std::nullopt;
  }
  const Curve& c = domain.curve(loc.curve);
  const double L = c.length();
  const double eps = 1e-9 * L;
  std::optional<BoundaryArc> piece;
  double t_on = loc.t;  // loc.t unwrapped into the piece's parameter range
  for (const BoundaryArc& a : components(domain, set_k)) {
    if (a.curve != loc.curve) continue;
    for (double t : {loc.t, loc.t + L}) {
      if (t >= a.t0 - eps && t <= a.t1 + eps) {
        piece = a;
        t_on = t;
      }
    }
  }
  if (!piece) {
    reason = "nearest boundary point is not in the closure of A_k";
    return std::nullopt;
  }
  DkResult dk;
  try {
    dk = build_Dk_detailed(domain, set_k, k);
  } catch (const Error& e) {
    reason = std::string("D_k unavailable: ") + e.what();
    return std::nullopt;
  }
  SideHit hit;
  if (loc.curve.kind != CurveKind::slit) {
    const CompanionCurve* cc = nullptr;
    for (const auto& comp : dk.companions) {
      if (comp.base_arc.curve == piece->curve && comp.base_arc.t0 == piece->t0) cc = &comp;
    }
    if (!cc) {
      reason = "no companion curve over the piece";
      return std::nullopt;
    }
    hit.point = cc->at(t_on);
    hit.route = "case II, type 1: companion point";
  } else {
    std::vector<Point> ends;
    if (piece->t0 > eps) ends.push_back(c.point_at(piece->t0));
    if (piece->t1 < L - eps) ends.push_back(c.point_at(piece->t1));
    if (ends.empty()) {
      reason = "welded piece covers the whole slit";
      return std::nullopt;
    }
    hit.point = *std::min_element(ends.begin(), ends.end(),
                                  [&](Point a, Point b) { return std::abs(a - z0) < std::abs(b - z0); });
    hit.route = "case II, type 2: endpoint of the welded piece";
  }
  hit.residual = dk.domain.boundary_distance(hit.point);
  return hit;
}

}  // namespace

SeparatorWitness find_separator(const CrossSpec& spec, const SeparatorQuery& query, MeasureEvaluator& eval,
                                const SeparatorOptions& options) {
  validate(spec);
  if (!(query.radius > 0.0)) fail(ErrorCode::config_error, "query radius must be positive");
  auto in_closure = [](const PlanarDomain& d, Point p) { return d.contains(p) || d.boundary_distance(p) <= 1e-9; };
  if (!in_closure(spec.D, query.z0)) fail(ErrorCode::invalid_input, "z0 is outside the closure of D");
  if (!in_closure(spec.G, query.w0)) fail(ErrorCode::invalid_input, "w0 is outside the closure of G");
  if (!(options.tol > 0.0)) fail(ErrorCode::config_error, "tol must be positive");
  std::vector<int> ks = options.ks;
  if (ks.empty()) {
    for (int k = 1; k <= options.k_max; ++k) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  if (ks.front() < 1) fail(ErrorCode::config_error, "ks must be positive");

  const Pair centre{query.z0, query.w0};
  const double r2 = query.radius * query.radius;
  const auto pts = probes(spec, query, options.probes, options.seed);
  std::vector<Point> zs, ws;
  for (const auto& p : pts) {
    zs.push_back(p.z);
    ws.push_back(p.w);
  }

  json diagnostics = json::array();
  for (int k : ks) {
    const BoundarySet Ak = widen(spec.D, spec.A, 1.0 / k);
    const BoundarySet Bk = widen(spec.G, spec.B, 1.0 / k);
    json diag = {{"k", k}};

    // Case I: the level set {ω_k(z) + ω_k(w) = 1} crosses U.
    if (pts.empty()) {
      diag["case_I"] = "U does not meet D x G";
    } else {
      const auto vz = eval.evaluate(spec.D, Ak, zs);
      const auto vw = eval.evaluate(spec.G, Bk, ws);
      std::vector<double> F(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) F[i] = vz[i].value + vw[i].value - 1.0;
      auto level = [&](const Pair& p) {
        return eval.evaluate(spec.D, Ak, p.z).value + eval.evaluate(spec.G, Bk, p.w).value - 1.0;
      };
      std::optional<SeparatorWitness> found;
      for (std::size_t i = 0; i < pts.size() && !found; ++i) {
        if (std::abs(F[i]) <= options.tol) {
          found = SeparatorWitness{WitnessKind::cross_envelope_k, k, pts[i].z, pts[i].w, std::abs(F[i]),
                                   "case I: probe on the level set"};
        }
      }
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
          if (F[i] < 0.0 && F[j] > 0.0) pairs.emplace_back(i, j);
        }
      }
      std::sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
        return std::make_pair(dist2(pts[a.first], pts[a.second]), a) < std::make_pair(dist2(pts[b.first], pts[b.second]), b);
      });
      int tried = 0;
      for (const auto& [i, j] : pairs) {
        if (found || tried >= 8) break;
        if (!segment_clear(spec.D, pts[i].z, pts[j].z) || !segment_clear(spec.G, pts[i].w, pts[j].w)) continue;
        ++tried;
        Pair lo = pts[i], hi = pts[j];
        for (int it = 0; it < 60; ++it) {
          const Pair mid{0.5 * (lo.z + hi.z), 0.5 * (lo.w + hi.w)};
          const double f = level(mid);
          if (std::abs(f) <= options.tol) {
            found = SeparatorWitness{WitnessKind::cross_envelope_k, k, mid.z, mid.w, std::abs(f),
                                     "case I: bisection on the level sum"};
            break;
          }
          (f < 0.0 ? lo : hi) = mid;
        }
      }
      if (found) return *found;
      if (pairs.empty()) {
        diag["case_I"] = "level sum has one sign on all " + std::to_string(pts.size()) + " probes";
      } else {
        diag["case_I"] = "bisection did not reach the tolerance";
      }
    }

    // Case II: a boundary point of D_k x G_k inside U.
    std::string reason_z, reason_w;
    if (auto hz = boundary_case(spec.D, Ak, k, query.z0, query.radius, reason_z)) {
      const Pair p{hz->point, query.w0};
      if (dist2(p, centre) <= r2 && hz->residual <= options.tol) {
        return {WitnessKind::product_k, k, p.z, p.w, hz->residual, hz->route + " in D"};
      }
      reason_z = "boundary point of D_k lies outside U";
    }
    if (auto hw = boundary_case(spec.G, Bk, k, query.w0, query.radius, reason_w)) {
      const Pair p{query.z0, hw->point};
      if (dist2(p, centre) <= r2 && hw->residual <= options.tol) {
        return {WitnessKind::product_k, k, p.z, p.w, hw->residual, hw->route + " in G"};
      }
      reason_w = "boundary point of G_k lies outside U";
    }
    diag["case_II_z"] = reason_z;
    diag["case_II_w"] = reason_w;
    diagnostics.push_back(diag);
  }
  throw NoWitness("no separating domain found for k in [" + std::to_string(ks.front()) + ", " +
                      std::to_string(ks.back()) + "]",
                  diagnostics);
}

}  // namespace crossenv
