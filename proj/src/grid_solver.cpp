#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "crossenv/error.hpp"
#include "crossenv/measure.hpp"

namespace crossenv {

namespace {

constexpr double kMinTheta = 1e-6;
constexpr int kUnknownOutside = -1;
constexpr int kFixedZero = -2;
constexpr std::uint32_t kObstacleTag = std::numeric_limits<std::uint32_t>::max();

const Point kDirections[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};

/// Where a grid arm or an interpolation ray meets the boundary.
struct Contact {
  double theta;  // fraction of the arm
  std::uint32_t tag;
  double t;
  Side face;  // plus/minus on slits, both when the ray runs along the slit
};

}  // namespace

struct GridSystem::Impl {
  PlanarDomain domain;
  GridConfig cfg;
  double h = 0.0;
  long i0 = 0, j0 = 0, nx = 0, ny = 0;
  std::vector<int> unknown_of;  // per node; index, kUnknownOutside or kFixedZero
  std::vector<long> node_of;    // per unknown: flat node index
  std::vector<std::uint32_t> contact_offset;
  std::vector<Contact> contacts;
  std::vector<double> diag;
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
  SegmentIndex obstacles;

  Point node_point(long flat) const {
    return {static_cast<double>(i0 + flat % nx) * h, static_cast<double>(j0 + flat / nx) * h};
  }

  /// First boundary (or obstacle) contact along [p, q], if any.
  std::optional<Contact> first_hit(Point p, Point q) const {
    std::optional<Contact> best;
    const Point lo{std::min(p.real(), q.real()), std::min(p.imag(), q.imag())};
    const Point hi{std::max(p.real(), q.real()), std::max(p.imag(), q.imag())};
    std::vector<std::size_t> hits;
    domain.index().query_box(lo, hi, hits);
    const auto& entries = domain.index().entries();
    for (std::size_t k : hits) {
      const auto& e = entries[k];
      const auto hit = first_contact(p, q, e.a, e.b);
      if (!hit) continue;
      if (best && hit->s >= best->theta) continue;
      const CurveId id = domain.curve_of_tag(e.tag);
      const Curve& c = domain.curve(id);
      Contact ct{hit->s, e.tag, c.segment_start(e.segment) + hit->u * c.segment_length(e.segment), Side::both};
      if (id.kind == CurveKind::slit) {
        const Point d = e.b - e.a;
        const double side = cross(d, p - e.a);
        if (std::abs(side) <= 1e-12 * std::abs(d) * std::abs(q - p)) {
          ct.face = Side::both;  // ray runs along the slit line
        } else {
          ct.face = side > 0.0 ? Side::plus : Side::minus;
        }
      }
      best = ct;
    }
    if (!obstacles.empty()) {
      hits.clear();
      obstacles.query_box(lo, hi, hits);
      for (std::size_t k : hits) {
        const auto& e = obstacles.entries()[k];
        const auto hit = first_contact(p, q, e.a, e.b);
        if (hit && (!best || hit->s < best->theta)) best = Contact{hit->s, kObstacleTag, 0.0, Side::both};
      }
    }
    return best;
  }

  // The set indicator is averaged over an arc window of one grid spacing
  // around the contact, so a jump between contacts is placed at its true
  // position instead of at the nearest contact.
  double boundary_value(const Contact& c, const SetIndicator& ind) const {
    if (c.tag == kObstacleTag) return 0.0;
    const CurveId id = domain.curve_of_tag(c.tag);
    const Side face = id.kind != CurveKind::slit ? Side::plus : c.face;
    return 1.0 - ind.coverage(id, c.t, h, face);
  }

  Contact nearest_contact(Point p) const {
    const BoundaryLocation loc = nearest_boundary(domain, p);
    return {1.0, domain.tag_of(loc.curve), loc.t, loc.side};
  }
};

namespace {

/// Inside test for one grid row by crossing parity (same half-open rule as
/// point_in_polygon).
void row_crossings(const PlanarDomain& domain, double y, std::vector<double>& xs) {
  xs.clear();
  auto scan = [&](const Curve& c) {
    const auto& v = c.vertices();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      const Point a = v[i], b = v[j];
      if ((a.imag() > y) != (b.imag() > y)) {
        xs.push_back(a.real() + (y - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()));
      }
    }
  };
  scan(domain.outer());
  for (const Curve& hole : domain.holes()) scan(hole);
  std::sort(xs.begin(), xs.end());
}

}  // namespace

GridSystem::GridSystem(const PlanarDomain& domain, const GridConfig& cfg, std::vector<std::vector<Point>> obstacles) {
  if (!(cfg.spacing > 0.0)) fail(ErrorCode::config_error, "grid spacing must be positive");
  if (cfg.max_iters < 1) fail(ErrorCode::config_error, "max_iters must be positive");
  if (!(cfg.residual_tol > 0.0)) fail(ErrorCode::config_error, "residual_tol must be positive");
  auto impl = std::make_shared<Impl>();
  impl->domain = domain;
  impl->cfg = cfg;
  const double h = cfg.spacing;
  impl->h = h;

  if (!domain.slits().empty() && h >= 0.5 * domain.min_slit_clearance()) {
    fail(ErrorCode::grid_too_coarse, "spacing must be below half the slit clearance");
  }

  std::vector<SegmentIndex::Entry> obstacle_entries;
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const auto& poly = obstacles[k];
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      obstacle_entries.push_back({poly[i], poly[i + 1], static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i)});
    }
  }
  impl->obstacles = SegmentIndex(std::move(obstacle_entries));

  impl->i0 = static_cast<long>(std::floor(domain.bbox_min().real() / h)) - 1;
  impl->j0 = static_cast<long>(std::floor(domain.bbox_min().imag() / h)) - 1;
  impl->nx = static_cast<long>(std::ceil(domain.bbox_max().real() / h)) + 2 - impl->i0;
  impl->ny = static_cast<long>(std::ceil(domain.bbox_max().imag() / h)) + 2 - impl->j0;
  const long nodes = impl->nx * impl->ny;
  impl->unknown_of.assign(static_cast<std::size_t>(nodes), kUnknownOutside);

  std::vector<double> xs;
  std::vector<double> dist(static_cast<std::size_t>(nodes), 0.0);
  for (long j = 0; j < impl->ny; ++j) {
    const double y = static_cast<double>(impl->j0 + j) * h;
    row_crossings(domain, y, xs);
    std::size_t passed = 0;
    for (long i = 0; i < impl->nx; ++i) {
      const double x = static_cast<double>(impl->i0 + i) * h;
      while (passed < xs.size() && xs[passed] <= x) ++passed;
      if ((xs.size() - passed) % 2 == 0) continue;
      const Point p{x, y};
      const double d = domain.boundary_distance(p);
      if (d <= 1e-9 * h) continue;
      const long flat = j * impl->nx + i;
      const double od = impl->obstacles.empty() ? INFINITY : impl->obstacles.distance(p);
      dist[static_cast<std::size_t>(flat)] = std::min(d, od);
      if (od <= 1e-9 * h) {
        impl->unknown_of[static_cast<std::size_t>(flat)] = kFixedZero;
        continue;
      }
      impl->unknown_of[static_cast<std::size_t>(flat)] = static_cast<int>(impl->node_of.size());
      impl->node_of.push_back(flat);
    }
  }
  const std::size_t n = impl->node_of.size();
  if (n == 0) fail(ErrorCode::grid_too_coarse, "no grid node inside the domain");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(5 * n);
  impl->diag.assign(n, 0.0);
  impl->contact_offset.assign(1, 0);
  std::vector<bool> slit_plus(domain.slits().size(), false), slit_minus(domain.slits().size(), false);
  const auto first_slit_tag = static_cast<std::uint32_t>(1 + domain.holes().size());

  for (std::size_t u = 0; u < n; ++u) {
    const long flat = impl->node_of[u];
    const Point p = impl->node_point(flat);
    const bool near = dist[static_cast<std::size_t>(flat)] <= h * (1.0 + 1e-9);
    const long i = flat % impl->nx, j = flat / impl->nx;
    const long neighbors[4] = {flat + 1, flat - 1, flat + impl->nx, flat - impl->nx};
    for (int d = 0; d < 4; ++d) {
      std::optional<Contact> hit;
      if (near) {
        hit = impl->first_hit(p, p + h * kDirections[d]);
      }
      const long nb = neighbors[d];
      const bool in_range = (d == 0 ? i + 1 < impl->nx : d == 1 ? i > 0 : d == 2 ? j + 1 < impl->ny : j > 0);
      const int nb_state = in_range ? impl->unknown_of[static_cast<std::size_t>(nb)] : kUnknownOutside;
      if (!hit && nb_state >= 0) {
        impl->diag[u] += 1.0;
        if (static_cast<std::size_t>(nb_state) < u) triplets.emplace_back(static_cast<int>(u), nb_state, -1.0);
        continue;
      }
      if (!hit) {
        hit = nb_state == kFixedZero ? Contact{1.0, kObstacleTag, 0.0, Side::both}
                                     : impl->nearest_contact(impl->node_point(nb));
      }
      hit->theta = std::max(hit->theta, kMinTheta);
      impl->diag[u] += 1.0 / hit->theta;
      if (hit->tag != kObstacleTag && hit->tag >= first_slit_tag) {
        const std::size_t s = hit->tag - first_slit_tag;
        if (hit->face != Side::minus) slit_plus[s] = true;
        if (hit->face != Side::plus) slit_minus[s] = true;
      }
      impl->contacts.push_back(*hit);
    }
    impl->contact_offset.push_back(static_cast<std::uint32_t>(impl->contacts.size()));
    triplets.emplace_back(static_cast<int>(u), static_cast<int>(u), impl->diag[u]);
  }
  for (std::size_t s = 0; s < slit_plus.size(); ++s) {
    if (!slit_plus[s] || !slit_minus[s]) {
      fail(ErrorCode::grid_too_coarse, "slit " + std::to_string(s) + " has a face without grid contacts");
    }
  }

  impl->matrix.resize(static_cast<int>(n), static_cast<int>(n));
  impl->matrix.setFromTriplets(triplets.begin(), triplets.end());
  impl->llt.compute(impl->matrix);
  if (impl->llt.info() != Eigen::Success) fail(ErrorCode::no_convergence, "grid factorisation failed");
  impl_ = std::move(impl);
}

const PlanarDomain& GridSystem::domain() const { return impl_->domain; }
const GridConfig& GridSystem::config() const { return impl_->cfg; }
std::size_t GridSystem::unknowns() const { return impl_->node_of.size(); }

std::size_t GridSystem::cut_nodes() const {
  std::size_t count = 0;
  for (std::size_t u = 0; u + 1 < impl_->contact_offset.size(); ++u) {
    if (impl_->contact_offset[u + 1] > impl_->contact_offset[u]) ++count;
  }
  return count;
}

GridSystem::Solution GridSystem::solve(const BoundarySet& set) const {
  // With obstacles the zero set may lie entirely inside the domain.
  if (impl_->obstacles.empty()) {
    require_nondegenerate(impl_->domain, set);
  } else {
    validate(impl_->domain, set);
  }
  const Impl& s = *impl_;
  const SetIndicator ind(s.domain, set);
  const std::size_t n = s.node_of.size();
  Eigen::SparseMatrix<double, Eigen::RowMajor> full = s.matrix.selfadjointView<Eigen::Lower>();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(n));
  for (std::size_t u = 0; u < n; ++u) {
    double rhs = 0.0;
    for (std::uint32_t c = s.contact_offset[u]; c < s.contact_offset[u + 1]; ++c) {
      rhs += s.boundary_value(s.contacts[c], ind) / s.contacts[c].theta;
    }
    b[static_cast<int>(u)] = rhs;
  }
  Eigen::VectorXd x = s.llt.solve(b);
  auto scaled_residual = [&](const Eigen::VectorXd& r) {
    double worst = 0.0;
    for (std::size_t u = 0; u < n; ++u) worst = std::max(worst, std::abs(r[static_cast<int>(u)]) / s.diag[u]);
    return worst;
  };
  Eigen::VectorXd r = b - full * x;
  double residual = scaled_residual(r);
  int sweeps = 0;
  while (residual > s.cfg.residual_tol) {
    if (sweeps >= s.cfg.max_iters) {
      fail(ErrorCode::no_convergence, "residual " + std::to_string(residual) + " above tolerance after " +
                                          std::to_string(sweeps) + " refinement sweeps");
    }
    x += s.llt.solve(r);
    r = b - full * x;
    residual = scaled_residual(r);
    ++sweeps;
  }
  std::vector<double> nodal(x.data(), x.data() + n);
  return Solution(impl_, set, std::move(nodal), residual, sweeps);
}

GridSystem::Solution::Solution(std::shared_ptr<const Impl> impl, BoundarySet set, std::vector<double> nodal,
                               double residual, int refinements)
    : impl_(std::move(impl)),
      indicator_(impl_->domain, set),
      nodal_(std::move(nodal)),
      residual_(residual),
      refinements_(refinements) {}

double GridSystem::Solution::value(Point z) const {
  const Impl& s = *impl_;
  if (s.domain.boundary_distance(z) <= 1e-12) fail(ErrorCode::point_on_boundary, "evaluation point lies on the boundary");
  if (!s.domain.contains(z, 0.0)) fail(ErrorCode::invalid_input, "evaluation point is not inside the domain");
  const double fx = z.real() / s.h - static_cast<double>(s.i0);
  const double fy = z.imag() / s.h - static_cast<double>(s.j0);
  const long i = std::clamp(static_cast<long>(std::floor(fx)), 0L, s.nx - 2);
  const long j = std::clamp(static_cast<long>(std::floor(fy)), 0L, s.ny - 2);
  const double ax = std::clamp(fx - static_cast<double>(i), 0.0, 1.0);
  const double ay = std::clamp(fy - static_cast<double>(j), 0.0, 1.0);
  double total = 0.0;
  for (int c = 0; c < 4; ++c) {
    const long ci = i + (c & 1), cj = j + (c >> 1);
    const double w = ((c & 1) ? ax : 1.0 - ax) * ((c >> 1) ? ay : 1.0 - ay);
    if (w == 0.0) continue;
    const long flat = cj * s.nx + ci;
    const Point corner = s.node_point(flat);
    double v;
    if (const auto hit = s.first_hit(z, corner)) {
      v = s.boundary_value(*hit, indicator_);
    } else {
      const int state = s.unknown_of[static_cast<std::size_t>(flat)];
      if (state >= 0) {
        v = nodal_[static_cast<std::size_t>(state)];
      } else if (state == kFixedZero) {
        v = 0.0;
      } else {
        v = s.boundary_value(s.nearest_contact(corner), indicator_);
      }
    }
    total += w * v;
  }
  return std::clamp(total, 0.0, 1.0);
}

MeasureField GridSystem::Solution::field(const std::vector<Point>& points) const {
  MeasureField f;
  f.engine = Engine::grid;
  f.points = points;
  f.std_error.assign(points.size(), 0.0);
  f.values.reserve(points.size());
  for (const Point& z : points) f.values.push_back(value(z));
  return f;
}

std::vector<Point> GridSystem::Solution::node_points() const {
  std::vector<Point> out;
  out.reserve(impl_->node_of.size());
  for (long flat : impl_->node_of) out.push_back(impl_->node_point(flat));
  return out;
}

MeasureField grid_measure(const PlanarDomain& domain, const BoundarySet& set, const GridConfig& cfg,
                          const std::vector<Point>& points) {
  require_nondegenerate(domain, set);
  return GridSystem(domain, cfg).solve(set).field(points);
}

}  // namespace crossenv
