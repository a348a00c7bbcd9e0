#include "crossenv/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "crossenv/error.hpp"
#include "crossenv/parallel.hpp"

namespace crossenv {

void validate(const CrossSpec& spec) {
  require_nondegenerate(spec.D, spec.A);
  require_nondegenerate(spec.G, spec.B);
}

CrossSpec swapped(const CrossSpec& spec) { return {spec.G, spec.B, spec.D, spec.A}; }

json spec_to_json(const CrossSpec& spec) {
  return json{{"D", domain_to_json(spec.D)},
              {"A", set_to_json(spec.A)},
              {"G", domain_to_json(spec.G)},
              {"B", set_to_json(spec.B)}};
}

CrossSpec spec_from_json(const json& j, const std::filesystem::path& base_dir) {
  auto member = [&](const char* key) -> json {
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::config_error, std::string("cross spec lacks ") + key);
    const json& v = j.at(key);
    if (v.is_string()) return load_json(base_dir / v.get<std::string>());
    return v;
  };
  CrossSpec spec{domain_from_json(member("D")), set_from_json(member("A")), domain_from_json(member("G")),
                 set_from_json(member("B"))};
  validate(spec);
  return spec;
}

double EngineConfig::budget() const {
  if (error_budget >= 0.0) return error_budget;
  switch (engine) {
    case Engine::closed_form: return 1e-12;
    case Engine::grid: return 1e-4;
    case Engine::wos: return 0.0;
  }
  return 0.0;
}

MeasureEvaluator::MeasureEvaluator(EngineConfig cfg) : cfg_(std::move(cfg)) {}

namespace {

std::string spacing_key(double h) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", h);
  return buf;
}

}  // namespace

std::shared_ptr<const GridSystem> MeasureEvaluator::grid_system(const PlanarDomain& domain) {
  const std::string key = config_hash(domain_to_json(domain)) + "/" + spacing_key(cfg_.grid.spacing);
  {
    std::shared_lock lock(mutex_);
    if (auto it = systems_.find(key); it != systems_.end()) return it->second;
  }
  auto system = std::make_shared<const GridSystem>(domain, cfg_.grid);
  std::unique_lock lock(mutex_);
  return systems_.emplace(key, std::move(system)).first->second;
}

std::shared_ptr<const GridSystem::Solution> MeasureEvaluator::grid_solution(const PlanarDomain& domain,
                                                                            const BoundarySet& set) {
  const std::string key = config_hash(domain_to_json(domain)) + "/" + config_hash(set_to_json(set)) + "/" +
                          spacing_key(cfg_.grid.spacing);
  {
    std::shared_lock lock(mutex_);
    if (auto it = solutions_.find(key); it != solutions_.end()) return it->second;
  }
  auto solution = std::make_shared<const GridSystem::Solution>(grid_system(domain)->solve(set));
  std::unique_lock lock(mutex_);
  return solutions_.emplace(key, std::move(solution)).first->second;
}

std::size_t MeasureEvaluator::cached_systems() const {
  std::shared_lock lock(mutex_);
  return systems_.size();
}

std::size_t MeasureEvaluator::cached_solutions() const {
  std::shared_lock lock(mutex_);
  return solutions_.size();
}

std::vector<MeasureEvaluator::Value> MeasureEvaluator::evaluate(const PlanarDomain& domain, const BoundarySet& set,
                                                                const std::vector<Point>& points) {
  std::vector<Value> out(points.size());
  switch (cfg_.engine) {
    case Engine::closed_form: {
      require_nondegenerate(domain, set);
      const MeasureField f = closed_form_measure(domain, set, points);
      for (std::size_t i = 0; i < points.size(); ++i) out[i] = {f.values[i], 0.0};
      break;
    }
    case Engine::grid: {
      const auto solution = grid_solution(domain, set);
      parallel_for(points.size(), cfg_.threads, [&](std::size_t i) { out[i] = {solution->value(points[i]), 0.0}; });
      break;
    }
    case Engine::wos: {
      const MeasureField f = wos_measure(domain, set, cfg_.wos, points);
      for (std::size_t i = 0; i < points.size(); ++i) out[i] = {f.values[i], f.std_error[i]};
      break;
    }
  }
  return out;
}

MeasureEvaluator::Value MeasureEvaluator::evaluate(const PlanarDomain& domain, const BoundarySet& set, Point z) {
  return evaluate(domain, set, std::vector<Point>{z}).front();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::inside: return "inside";
    case Verdict::outside: return "outside";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

Membership combine(MeasureEvaluator::Value a, MeasureEvaluator::Value b, double budget) {
  Membership m;
  m.omega_z = a.value;
  m.omega_w = b.value;
  m.margin = 1.0 - (a.value + b.value);
  m.std_error = std::hypot(a.std_error, b.std_error);
  if (std::abs(m.margin) <= 3.0 * m.std_error + budget) {
    m.verdict = Verdict::indeterminate;
  } else {
    m.verdict = m.margin > 0.0 ? Verdict::inside : Verdict::outside;
  }
  return m;
}

void require_interior(const PlanarDomain& domain, Point p, const char* what) {
  if (!domain.contains(p, 0.0)) fail(ErrorCode::invalid_input, std::string(what) + " is not an interior point");
}

EnvelopeSlice make_slice(const PlanarDomain& fixed_domain, const BoundarySet& fixed_set, Point fixed,
                         const PlanarDomain& free_domain, const BoundarySet& free_set, const std::vector<Point>& pts,
                         MeasureEvaluator& eval, bool fixed_in_G) {
  require_interior(fixed_domain, fixed, "fixed point");
  for (const Point& p : pts) require_interior(free_domain, p, "slice point");
  const auto f = eval.evaluate(fixed_domain, fixed_set, fixed);
  const auto values = eval.evaluate(free_domain, free_set, pts);
  EnvelopeSlice s;
  s.fixed_in_G = fixed_in_G;
  s.fixed_point = fixed;
  s.fixed_value = f.value;
  s.points = pts;
  const double budget = eval.config().budget();
  for (const auto& v : values) {
    const Membership m = combine(v, f, budget);
    s.margin.push_back(m.margin);
    s.std_error.push_back(m.std_error);
    s.verdict.push_back(m.verdict);
    s.mask.push_back(m.margin > 0.0);
  }
  return s;
}

}  // namespace

Membership envelope_membership(const CrossSpec& spec, Point z, Point w, MeasureEvaluator& eval) {
  validate(spec);
  require_interior(spec.D, z, "z");
  require_interior(spec.G, w, "w");
  return combine(eval.evaluate(spec.D, spec.A, z), eval.evaluate(spec.G, spec.B, w), eval.config().budget());
}

std::size_t EnvelopeSlice::inside_count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

std::size_t EnvelopeSlice::indeterminate_count() const {
  return static_cast<std::size_t>(std::count(verdict.begin(), verdict.end(), Verdict::indeterminate));
}

EnvelopeSlice envelope_slice(const CrossSpec& spec, Point w, const std::vector<Point>& z_points,
                             MeasureEvaluator& eval) {
  validate(spec);
  return make_slice(spec.G, spec.B, w, spec.D, spec.A, z_points, eval, true);
}

EnvelopeSlice envelope_slice_fixed_z(const CrossSpec& spec, Point z, const std::vector<Point>& w_points,
                                     MeasureEvaluator& eval) {
  validate(spec);
  return make_slice(spec.D, spec.A, z, spec.G, spec.B, w_points, eval, false);
}

std::string slice_to_csv(const EnvelopeSlice& slice, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "x,y,margin,mask\n";
  char buf[128];
  for (std::size_t i = 0; i < slice.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", slice.points[i].real(), slice.points[i].imag(),
                  slice.margin[i], slice.mask[i] ? 1 : 0);
    out += buf;
  }
  return out;
}

json slice_summary(const CrossSpec& spec, const EnvelopeSlice& slice) {
  json out;
  out["spec_hash"] = config_hash(spec_to_json(spec));
  out[slice.fixed_in_G ? "w" : "z"] = point_to_json(slice.fixed_point);
  out["fixed_value"] = slice.fixed_value;
  out["counts"] = json{{"points", slice.points.size()},
                       {"inside", slice.inside_count()},
                       {"outside", slice.points.size() - slice.inside_count()},
                       {"indeterminate", slice.indeterminate_count()}};
  if (!slice.margin.empty()) {
    out["min_margin"] = *std::min_element(slice.margin.begin(), slice.margin.end());
    out["max_margin"] = *std::max_element(slice.margin.begin(), slice.margin.end());
  }
  out["mask_all_true"] = slice.inside_count() == slice.points.size();
  return out;
}

std::vector<Point> interior_grid(const PlanarDomain& domain, int nx, int ny, double min_distance) {
  if (nx < 1 || ny < 1) fail(ErrorCode::config_error, "evaluation grid needs positive dimensions");
  const Point lo = domain.bbox_min(), hi = domain.bbox_max();
  std::vector<Point> out;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point p{lo.real() + (hi.real() - lo.real()) * (i + 0.5) / nx,
                    lo.imag() + (hi.imag() - lo.imag()) * (j + 0.5) / ny};
      if (domain.contains(p, std::max(min_distance, 1e-12))) out.push_back(p);
    }
  }
  return out;
}

std::vector<std::pair<int, BoundarySet>> neighborhood_family(const PlanarDomain& domain, const BoundarySet& set,
                                                             const std::vector<int>& ks) {
  std::vector<std::pair<int, BoundarySet>> out;
  for (int k : ks) {
    if (k < 1) fail(ErrorCode::config_error, "k must be positive");
    out.emplace_back(k, widen(domain, set, 1.0 / k));
  }
  return out;
}

json ConvergenceReport::to_json() const {
  json out;
  out["ks"] = ks;
  out["discrepancy"] = discrepancy;
  out["residual_length"] = residual_length;
  out["monotone"] = monotone;
  out["discrepancy_decreasing"] = discrepancy_decreasing;
  out["points"] = json::array();
  for (std::size_t p = 0; p < points.size(); ++p) {
    json row{{"z", point_to_json(points[p])}, {"limit", limit[p]}};
    json seq = json::array();
    for (std::size_t k = 0; k < ks.size(); ++k) seq.push_back(values[k][p]);
    row["values"] = seq;
    out["points"].push_back(row);
  }
  out["pass"] = pass();
  return out;
}

ConvergenceReport check_monotone_convergence(const PlanarDomain& domain, const BoundarySet& set,
                                             const std::vector<std::pair<int, BoundarySet>>& family,
                                             const std::vector<Point>& points, MeasureEvaluator& eval) {
  require_nondegenerate(domain, set);
  for (std::size_t i = 0; i < family.size(); ++i) {
    validate(domain, family[i].second);
    if (!set_contains(domain, family[i].second, set, 1e-12)) {
      fail(ErrorCode::not_nested, "A is not contained in A_" + std::to_string(family[i].first));
    }
    if (i > 0) {
      if (family[i].first <= family[i - 1].first) fail(ErrorCode::not_nested, "family must be ordered by k");
      if (!set_contains(domain, family[i - 1].second, family[i].second, 1e-12)) {
        fail(ErrorCode::not_nested, "A_" + std::to_string(family[i].first) + " is not inside A_" +
                                        std::to_string(family[i - 1].first));
      }
    }
  }
  ConvergenceReport r;
  r.points = points;
  const auto base = eval.evaluate(domain, set, points);
  for (const auto& v : base) r.limit.push_back(v.value);
  std::vector<double> base_err;
  for (const auto& v : base) base_err.push_back(v.std_error);
  for (const auto& [k, ak] : family) {
    r.ks.push_back(k);
    const auto vals = eval.evaluate(domain, ak, points);
    std::vector<double> v, e;
    double worst = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      v.push_back(vals[p].value);
      e.push_back(vals[p].std_error);
      worst = std::max(worst, std::abs(vals[p].value - r.limit[p]));
    }
    r.values.push_back(std::move(v));
    r.errors.push_back(std::move(e));
    r.discrepancy.push_back(worst);
  }
  if (!family.empty()) r.residual_length = arc_length(family.back().second) - arc_length(set);

  const double slack = eval.config().engine == Engine::wos ? 0.0 : 1e-12;
  r.monotone = true;
  r.discrepancy_decreasing = true;
  for (std::size_t k = 1; k < r.ks.size(); ++k) {
    double worst_noise = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double noise = 3.0 * std::hypot(r.errors[k][p], r.errors[k - 1][p]) + slack;
      worst_noise = std::max(worst_noise, noise);
      if (r.values[k][p] < r.values[k - 1][p] - noise) r.monotone = false;
    }
    if (r.discrepancy[k] > r.discrepancy[k - 1] + worst_noise) r.discrepancy_decreasing = false;
  }
  return r;
}

}  // namespace crossenv
