#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "crossenv/construct.hpp"
#include "crossenv/parallel.hpp"

namespace crossenv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Point of the segment c -> e where f changes sign, approached from the
/// side where f >= 0. Requires f(c) < 0 <= f(e).
std::vector<double> bisect(const ScalarField& f, const std::vector<double>& c, const std::vector<double>& e) {
  std::vector<double> x(c.size());
  double a = 0.0, b = 1.0;
  auto at = [&](double t) {
    for (std::size_t i = 0; i < c.size(); ++i) x[i] = c[i] + t * (e[i] - c[i]);
    return f(x);
  };
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    (at(m) < 0.0 ? a : b) = m;
  }
  at(b);
  return x;
}

double gradient_norm(const ScalarField& f, std::vector<double> x, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    s += std::pow((fp - fm) / (2.0 * h), 2);
  }
  return std::sqrt(s);
}

/// Lattice of `grid` points per axis over [lo, hi]^dim; index -> point.
struct Lattice {
  int dim;
  int grid;
  double lo, hi;

  std::size_t size() const { return static_cast<std::size_t>(std::pow(grid, dim) + 0.5); }
  std::vector<double> point(std::size_t idx, bool* on_surface = nullptr) const {
    std::vector<double> x(static_cast<std::size_t>(dim));
    bool surface = false;
    for (int d = 0; d < dim; ++d) {
      const int c = static_cast<int>(idx % static_cast<std::size_t>(grid));
      idx /= static_cast<std::size_t>(grid);
      surface = surface || c == 0 || c == grid - 1;
      x[static_cast<std::size_t>(d)] = lo + (hi - lo) * c / (grid - 1);
    }
    if (on_surface) *on_surface = surface;
    return x;
  }
};

}  // namespace

double levi_min_eigenvalue(const ScalarField& f, const std::vector<double>& x0, int n, double step) {
  const auto dim = static_cast<std::size_t>(2 * n);
  if (x0.size() != dim) fail(ErrorCode::invalid_input, "point dimension does not match 2n");
  std::vector<double> x = x0;
  const double f0 = f(x);
  auto shifted = [&](std::size_t a, double da, std::size_t b, double db) {
    x[a] += da;
    x[b] += db;
    const double v = f(x);
    x = x0;
    return v;
  };
  Eigen::MatrixXd H(dim, dim);
  Eigen::VectorXd g(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double fp = shifted(a, step, a, 0.0);
    const double fm = shifted(a, -step, a, 0.0);
    g(a) = (fp - fm) / (2.0 * step);
    H(a, a) = (fp - 2.0 * f0 + fm) / (step * step);
    for (std::size_t b = a + 1; b < dim; ++b) {
      const double v = (shifted(a, step, b, step) - shifted(a, step, b, -step) - shifted(a, -step, b, step) +
                        shifted(a, -step, b, -step)) /
                       (4.0 * step * step);
      H(a, b) = H(b, a) = v;
    }
  }
  using C = std::complex<double>;
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd L(nn, nn);
  Eigen::VectorXcd dz(nn);
  for (Eigen::Index j = 0; j < nn; ++j) {
    const Eigen::Index xj = 2 * j, yj = 2 * j + 1;
    dz(j) = 0.5 * C(g(xj), -g(yj));
    for (Eigen::Index k = 0; k < nn; ++k) {
      const Eigen::Index xk = 2 * k, yk = 2 * k + 1;
      L(j, k) = 0.25 * C(H(xj, xk) + H(yj, yk), H(xj, yk) - H(yj, xk));
    }
  }
  if (n == 1) return L(0, 0).real();
  // Complex tangent space {v : Σ ∂f/∂z_j v_j = 0} is the orthogonal
  // complement of conj(∂f/∂z).
  const Eigen::VectorXcd normal = dz.conjugate();
  if (normal.norm() == 0.0) return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(L).eigenvalues()(0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(normal);
  const Eigen::MatrixXcd Q = qr.householderQ();
  const Eigen::MatrixXcd T = Q.rightCols(nn - 1);
  const Eigen::MatrixXcd R = T.adjoint() * L * T;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(R).eigenvalues()(0);
}

LevelSetDomain ball_with_cap(int n, double c, double amplitude, double width) {
  if (n < 1) fail(ErrorCode::config_error, "dimension must be positive");
  if (!(amplitude > 0.0 && amplitude <= 1.0) || !(width > 0.0)) fail(ErrorCode::config_error, "bad cap parameters");
  LevelSetDomain d;
  d.n = n;
  d.lo = -1.2;
  d.hi = 1.2;
  d.rho = [](const std::vector<double>& x) {
    double s = -1.0;
    for (double v : x) s += v * v;
    return s;
  };
  d.lam = [c, amplitude, width](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    if (r2 == 0.0) return 0.0;
    const double s = std::clamp((x[0] / std::sqrt(r2) - c) / width, 0.0, 1.0);
    return amplitude * s * s * s * (s * (6.0 * s - 15.0) + 10.0);
  };
  return d;
}

bool PropCReport::pass() const {
  return N >= 1 && N <= 64 && lambda_in_range && !entries.empty() && entries.back().intersection;
}

json PropCReport::to_json() const {
  json rows = json::array();
  for (const auto& e : entries) {
    rows.push_back({{"k", e.k},
                    {"checks",
                     {{"nesting", e.nesting},
                      {"trace", e.trace},
                      {"intersection", e.intersection},
                      {"levi_min_eig", e.levi_min_eig}}},
                    {"pass", e.pass()}});
  }
  return {{"n", n},
          {"grid", grid},
          {"entries", rows},
          {"N", N},
          {"lambda_in_range", lambda_in_range},
          {"degenerate", degenerate},
          {"rho_levi_min", rho_levi_min},
          {"samples", samples},
          {"rays", rays},
          {"trace_skipped", trace_skipped},
          {"pass", pass()}};
}

PropCResult build_propC_sequence(const LevelSetDomain& base, const PropCOptions& options) {
  if (base.n < 1 || !base.rho || !base.lam) fail(ErrorCode::config_error, "level-set domain is incomplete");
  if (options.grid < 3) fail(ErrorCode::config_error, "grid needs at least 3 points per axis");
  if (!(base.hi > base.lo)) fail(ErrorCode::config_error, "empty sampling box");
  std::vector<int> ks = options.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty() || ks.front() < 1) fail(ErrorCode::config_error, "ks must be positive");
  if (ks.size() > 64) fail(ErrorCode::config_error, "at most 64 values of k");

  const int dim = 2 * base.n;
  const Lattice lattice{dim, options.grid, base.lo, base.hi};
  const double step = options.fd_step_rel * (base.hi - base.lo);
  const std::vector<double> centre(static_cast<std::size_t>(dim), 0.5 * (base.lo + base.hi));
  if (!(base.rho(centre) < 0.0)) fail(ErrorCode::invalid_input, "cube centre is not inside the domain");
  const std::size_t nk = ks.size();

  PropCResult result;
  for (int k : ks) {
    LevelSetDomain d = base;
    d.k = k;
    result.domains.push_back(std::move(d));
  }
  auto phi = [&](std::size_t i) -> ScalarField {
    const double inv = 1.0 / ks[i];
    return [&base, inv](const std::vector<double>& x) { return base.rho(x) - base.lam(x) * inv; };
  };

  // Lattice checks: nesting, λ range, exclusion of far exterior points.
  struct SampleOut {
    std::uint64_t inside = 0;  // bit i: sample in D_{ks[i]}
    bool far = false;          // outside closure(D) at distance > tol
    bool lam_ok = true;
    bool lam_zero = true;
  };
  const std::size_t total = lattice.size();
  std::vector<SampleOut> sample_out(total);
  parallel_for(total, options.threads, [&](std::size_t idx) {
    const auto x = lattice.point(idx);
    const double r = base.rho(x);
    const double l = base.lam(x);
    SampleOut& o = sample_out[idx];
    o.lam_ok = l >= 0.0 && l <= 1.0;
    o.lam_zero = l == 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
      if (r < 0.0 || r - l / ks[i] < 0.0) o.inside |= std::uint64_t{1} << i;
    }
    if (r > 0.0) {
      const double g = gradient_norm(base.rho, x, step);
      o.far = g > 0.0 ? r / g > options.tol : true;
    }
  }, 256);

  // Ray checks: trace on ∂D, Levi form on ∂D_k.
  std::vector<std::size_t> ray_ends;
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool surface = false;
    lattice.point(idx, &surface);
    if (surface) ray_ends.push_back(idx);
  }
  struct RayOut {
    bool on_A = false;
    double rho_levi = kInf;
    std::uint64_t trace_bad = 0;
    std::uint64_t trace_skip = 0;
    std::vector<double> levi;
  };
  std::vector<RayOut> ray_out(ray_ends.size());
  parallel_for(ray_ends.size(), options.threads, [&](std::size_t r) {
    const auto end = lattice.point(ray_ends[r]);
    RayOut& o = ray_out[r];
    o.levi.assign(nk, kInf);
    if (base.rho(end) >= 0.0) {
      const auto xb = bisect(base.rho, centre, end);
      const double l = base.lam(xb);
      const double rb = base.rho(xb);
      o.on_A = l > 0.0;
      if (o.on_A) o.rho_levi = levi_min_eigenvalue(base.rho, xb, base.n, step);
      for (std::size_t i = 0; i < nk; ++i) {
        if (l > 0.0 && l / ks[i] < 1e-12) {
          o.trace_skip |= std::uint64_t{1} << i;
          continue;
        }
        const bool in_Dk = rb < 0.0 || rb - l / ks[i] < 0.0;
        if (in_Dk != o.on_A) o.trace_bad |= std::uint64_t{1} << i;
      }
    }
    for (std::size_t i = 0; i < nk; ++i) {
      const ScalarField f = phi(i);
      if (f(end) < 0.0) continue;  // ∂D_k not reached inside the box
      o.levi[i] = levi_min_eigenvalue(f, bisect(f, centre, end), base.n, step);
    }
  }, 4);

  PropCReport& rep = result.report;
  rep.n = base.n;
  rep.grid = options.grid;
  rep.samples = total;
  rep.rays = ray_ends.size();
  rep.lambda_in_range = std::all_of(sample_out.begin(), sample_out.end(), [](const SampleOut& o) { return o.lam_ok; });
  rep.degenerate = std::all_of(sample_out.begin(), sample_out.end(), [](const SampleOut& o) { return o.lam_zero; }) &&
                   std::none_of(ray_out.begin(), ray_out.end(), [](const RayOut& o) { return o.on_A; });
  rep.rho_levi_min = kInf;
  for (const auto& o : ray_out) rep.rho_levi_min = std::min(rep.rho_levi_min, o.rho_levi);
  if (rep.rho_levi_min == kInf) rep.rho_levi_min = 0.0;
  for (const auto& o : ray_out) rep.trace_skipped += static_cast<std::size_t>(std::popcount(o.trace_skip));

  for (std::size_t i = 0; i < nk; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    PropCEntry e;
    e.k = ks[i];
    e.nesting = true;
    e.intersection = true;
    for (const auto& o : sample_out) {
      if (i + 1 < nk && (o.inside & (bit << 1)) && !(o.inside & bit)) e.nesting = false;
      if (o.far && (o.inside & bit)) e.intersection = false;
    }
    e.trace = std::none_of(ray_out.begin(), ray_out.end(), [&](const RayOut& o) { return (o.trace_bad & bit) != 0; });
    e.levi_min_eig = kInf;
    for (const auto& o : ray_out) e.levi_min_eig = std::min(e.levi_min_eig, o.levi[i]);
    if (e.levi_min_eig == kInf) e.levi_min_eig = 0.0;
    rep.entries.push_back(e);
  }

  if (std::none_of(rep.entries.begin(), rep.entries.end(), [](const PropCEntry& e) { return e.levi_min_eig > 0.0; })) {
    fail(ErrorCode::not_strongly_pseudoconvex, "Levi form is not positive on the boundary for any tested k");
  }
  for (std::size_t i = nk; i-- > 0;) {
    if (!rep.entries[i].pass()) break;
    rep.N = rep.entries[i].k;
  }
  return result;
}

}  // namespace crossenv
