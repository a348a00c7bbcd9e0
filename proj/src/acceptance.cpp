#include "crossenv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

#include "crossenv/construct.hpp"
#include "crossenv/envelope.hpp"
#include "crossenv/fixtures.hpp"

namespace crossenv::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Uniform points of the domain at distance >= min_distance from its
/// boundary, by rejection from the bounding box.
std::vector<Point> random_points(const PlanarDomain& domain, std::size_t count, double min_distance,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const Point lo = domain.bbox_min(), hi = domain.bbox_max();
  std::vector<Point> out;
  while (out.size() < count) {
    const Point p(lo.real() + (hi.real() - lo.real()) * unit(), lo.imag() + (hi.imag() - lo.imag()) * unit());
    if (domain.contains(p) && domain.boundary_distance(p) >= min_distance) out.push_back(p);
  }
  return out;
}

CriterionResult named(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

EngineConfig grid_engine(double h, unsigned threads) {
  EngineConfig cfg;
  cfg.engine = Engine::grid;
  cfg.grid.spacing = h;
  cfg.threads = threads;
  return cfg;
}

// 1. Example 2: Ŵ° = D x G.
CriterionResult example2(const Options& o) {
  CriterionResult r = named(1, "Example 2 reproduction");
  const CrossSpec spec = fixtures::example2();
  MeasureEvaluator eval(grid_engine(1.0 / 256, o.threads));
  const auto ws = random_points(spec.G, 50, 0.0, o.seed);
  const auto zs = random_points(spec.D, 200, 0.05, o.seed + 1);
  double w_max = 0.0;
  for (const auto& v : eval.evaluate(spec.G, spec.B, ws)) w_max = std::max(w_max, v.value);
  double z_min = 1.0, z_max = 0.0;
  for (const auto& v : eval.evaluate(spec.D, spec.A, zs)) {
    z_min = std::min(z_min, v.value);
    z_max = std::max(z_max, v.value);
  }
  std::size_t masked_out = 0;
  for (const Point& w : ws) {
    const EnvelopeSlice s = envelope_slice(spec, w, zs, eval);
    masked_out += s.points.size() - s.inside_count();
  }
  r.pass = w_max <= 1e-6 && z_min > 0.0 && z_max < 1.0 - 1e-3 && masked_out == 0;
  r.summary = "max omega(w,B,G) " + fmt("%.2e", w_max) + " <= 1e-6, omega(z,A,D) in [" + fmt("%.5f", z_min) + ", " +
              fmt("%.5f", z_max) + "] inside (0, 0.999), slice points outside mask " + std::to_string(masked_out);
  r.details = {{"h", 1.0 / 256}, {"w_samples", ws.size()}, {"z_samples", zs.size()}, {"omega_w_max", w_max},
               {"omega_z_min", z_min}, {"omega_z_max", z_max}, {"mask_false", masked_out}};
  return r;
}

// 2. Grid and WoS against the disc closed form.
CriterionResult closed_form(const Options& o) {
  CriterionResult r = named(2, "closed-form agreement on the disc");
  const PlanarDomain disc = fixtures::unit_disc();
  std::vector<Point> pts;
  std::mt19937_64 rng(o.seed + 2);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  while (pts.size() < 20) {
    const Point p(2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
    if (std::abs(p) <= 0.9 && disc.boundary_distance(p) >= 0.1) pts.push_back(p);
  }
  WosConfig wcfg;
  wcfg.samples = 100000;
  wcfg.seed = o.seed;
  wcfg.threads = o.threads;
  const ExitTable exits = WosSampler(disc, wcfg).run(pts);
  GridConfig gcfg;
  gcfg.spacing = 1.0 / 256;
  const GridSystem grid(disc, gcfg);
  double grid_err = 0.0, worst_z = 0.0, sum_z = 0.0, sum_z2 = 0.0;
  json arcs = json::array();
  for (double len : {kPi / 4, kPi, 3 * kPi / 2}) {
    const double a = 0.3;
    const BoundarySet set{{fixtures::disc_arc(disc, a, a + len)}};
    const auto sol = grid.solve(set);
    const MeasureField wos = evaluate_exits(disc, exits, set);
    double ge = 0.0, wz = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double exact = disc_arc_measure(pts[i], {{a, a + len}});
      ge = std::max(ge, std::abs(sol.value(pts[i]) - exact));
      const double z = (wos.values[i] - exact) / wos.std_error[i];
      wz = std::max(wz, std::abs(z));
      sum_z += z;
      sum_z2 += z * z;
    }
    grid_err = std::max(grid_err, ge);
    worst_z = std::max(worst_z, wz);
    arcs.push_back({{"length", len}, {"grid_max_error", ge}, {"wos_max_z", wz}});
  }
  const double n = 3.0 * static_cast<double>(pts.size());
  const double mean_z = sum_z / n, rms_z = std::sqrt(sum_z2 / n);
  r.pass = grid_err <= 5e-3 && worst_z <= 3.0;
  r.summary = "grid max error " + fmt("%.2e", grid_err) + " <= 5e-3, WoS max |error|/stderr " + fmt("%.2f", worst_z) +
              " <= 3 (1e5 samples; mean z " + fmt("%.2f", mean_z) + ", rms z " + fmt("%.2f", rms_z) + ")";
  r.details = {{"arcs", arcs}, {"mean_z", mean_z}, {"rms_z", rms_z}, {"points", pts.size()}, {"samples", wcfg.samples}, {"seed", o.seed}};
  return r;
}

// 3. ω(0, A_k) increases to ω(0, A) with the centre formula gap.
CriterionResult convergence(const Options& o) {
  CriterionResult r = named(3, "monotone convergence");
  const PlanarDomain disc = fixtures::unit_disc();
  MeasureEvaluator eval(grid_engine(1.0 / 256, o.threads));
  const double a = 0.0, b = kPi;
  const double limit = eval.evaluate(disc, BoundarySet{{fixtures::disc_arc(disc, a, b)}}, Point{}).value;
  const std::vector<int> ks{1, 2, 4, 8, 16, 32, 64, 128, 256, 320};
  bool monotone = true;
  double prev = -1.0, worst = 0.0;
  json rows = json::array();
  for (int k : ks) {
    const double pad = 1.0 / k;
    const double v = eval.evaluate(disc, BoundarySet{{fixtures::disc_arc(disc, a - pad, b + pad)}}, Point{}).value;
    const double gap = (2.0 / k) / (2.0 * kPi);
    const double err = std::abs((limit - v) - gap);
    monotone = monotone && v >= prev - 1e-12;
    prev = v;
    worst = std::max(worst, err);
    rows.push_back({{"k", k}, {"omega", v}, {"gap", limit - v}, {"expected_gap", gap}});
  }
  r.pass = monotone && worst <= 5e-3;
  r.summary = std::string("nondecreasing in k: ") + (monotone ? "yes" : "no") + ", max |gap - (2/k)/(2pi)| " +
              fmt("%.2e", worst) + " <= 5e-3";
  r.details = {{"limit", limit}, {"rows", rows}};
  return r;
}

// 4. ω(z, A_k, D_k) = ω(z, A_k, D) for a disc with one pocket.
CriterionResult gluing(const Options&) {
  CriterionResult r = named(4, "gluing identity");
  const PlanarDomain disc = fixtures::unit_disc();
  const BoundarySet Ak{{fixtures::disc_arc(disc, 0.0, kPi / 2)}};
  const DkResult dk = build_Dk_detailed(disc, Ak, 20);
  std::vector<Point> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(std::polar(0.3 + 0.06 * i, 0.3 + 2.0 * kPi * i / 10));
  GridConfig coarse, fine;
  coarse.spacing = 1.0 / 256;
  fine.spacing = 1.0 / 512;
  const GluingReport rc = verify_gluing(disc, Ak, dk, samples, coarse);
  const GluingReport rf = verify_gluing(disc, Ak, dk, samples, fine);
  r.pass = rc.max_discrepancy <= 1e-2 && rf.max_discrepancy < rc.max_discrepancy;
  r.summary = "max discrepancy " + fmt("%.2e", rc.max_discrepancy) + " <= 1e-2 at h=1/256, " +
              fmt("%.2e", rf.max_discrepancy) + " at h=1/512 (must decrease)";
  r.details = {{"pocket_area", dk.companions.front().pocket_area()}, {"h256", rc.to_json()}, {"h512", rf.to_json()}};
  return r;
}

// 5. Hypothesis (H) for the level-set sequences.
CriterionResult propc(const Options& o) {
  CriterionResult r = named(5, "hypothesis (H) checks");
  struct Case {
    const char* name;
    int n;
    int grid;
    int finer;
  };
  bool ok = true;
  json cases = json::array();
  std::string summary;
  for (const Case c : {Case{"disc C^1", 1, 201, 401}, Case{"ball C^2", 2, 21, 25}}) {
    const LevelSetDomain base = ball_with_cap(c.n);
    PropCOptions opt;
    opt.threads = o.threads;
    opt.grid = c.grid;
    const PropCReport a = build_propC_sequence(base, opt).report;
    opt.grid = c.finer;
    const PropCReport b = build_propC_sequence(base, opt).report;
    auto pos = [&](int N) {
      const auto it = std::find(opt.ks.begin(), opt.ks.end(), N);
      return it == opt.ks.end() ? -100 : static_cast<int>(it - opt.ks.begin());
    };
    const bool stable = a.N > 0 && b.N > 0 && std::abs(pos(a.N) - pos(b.N)) <= 1;
    const bool checks_ok = a.pass() && b.pass() &&
                           std::all_of(a.entries.begin(), a.entries.end(), [](const PropCEntry& e) { return e.nesting && e.trace; });
    ok = ok && checks_ok && stable;
    if (!summary.empty()) summary += "; ";
    summary += std::string(c.name) + " N=" + std::to_string(a.N) + " (grid " + std::to_string(c.grid) + "), N=" +
               std::to_string(b.N) + " (grid " + std::to_string(c.finer) + "), intersection at k=64 " +
               (a.entries.back().intersection ? "yes" : "no");
    cases.push_back({{"name", c.name}, {"report", a.to_json()}, {"refined", b.to_json()}, {"stable", stable}});
  }
  r.pass = ok;
  r.summary = summary + ", N <= 64 and stable within one k-step";
  r.details = {{"cases", cases}};
  return r;
}

// 6. Separator witnesses and the Example 2 failure.
CriterionResult separators(const Options& o) {
  CriterionResult r = named(6, "separator witnesses");
  MeasureEvaluator eval(grid_engine(1.0 / 256, o.threads));
  SeparatorOptions opt;
  opt.seed = o.seed;
  const CrossSpec cross = fixtures::half_arc_cross();
  double worst = 0.0;
  int found = 0;
  json witnesses = json::array();
  for (int i = 0; i < 10; ++i) {
    // ω(iy) + ω(-iy) = 1 for the upper half circle, so (iy, -iy) is on ∂Ŵ°.
    const double y = -0.45 + 0.1 * i;
    const SeparatorQuery q{Point(0.02 * ((i % 3) - 1), y), Point(-0.01 * (i % 2), -y), 0.05};
    try {
      const SeparatorWitness w = find_separator(cross, q, eval, opt);
      const double dz = std::abs(w.z - q.z0), dw = std::abs(w.w - q.w0);
      if (w.kind == WitnessKind::cross_envelope_k && w.boundary_residual <= 1e-3 && dz * dz + dw * dw <= q.radius * q.radius) {
        ++found;
      }
      worst = std::max(worst, w.boundary_residual);
      witnesses.push_back(w.to_json());
    } catch (const NoWitness& e) {
      witnesses.push_back({{"error", e.what()}});
    }
  }
  const CrossSpec ex2 = fixtures::example2();
  int no_witness = 0;
  json ex2_rows = json::array();
  for (const double x : {-0.15, -0.05, 0.05, 0.15}) {
    const SeparatorQuery q{Point(x, 0.0), Point(0.3 * x, 0.2), 0.05};
    try {
      ex2_rows.push_back(find_separator(ex2, q, eval, opt).to_json());
    } catch (const NoWitness& e) {
      ++no_witness;
      ex2_rows.push_back({{"no_witness", e.what()}});
    }
  }
  r.pass = found == 10 && no_witness == 4;
  r.summary = "case I witnesses " + std::to_string(found) + "/10 with max |sum-1| " + fmt("%.2e", worst) +
              " <= 1e-3; Example 2 NoWitness " + std::to_string(no_witness) + "/4 for k <= 64";
  r.details = {{"witnesses", witnesses}, {"example2", ex2_rows}};
  return r;
}

// 7. Invariant battery.
CriterionResult invariants(const Options& o) {
  CriterionResult r = named(7, "invariant battery");
  struct Fixture {
    const char* name;
    PlanarDomain domain;
    BoundarySet set;
    double h;
    Point near_A_from, near_A_to;  // approach a point of A
    Point near_rest_from, near_rest_to;
  };
  const PlanarDomain disc = fixtures::unit_disc();
  const PlanarDomain ex1 = fixtures::example1();
  const PlanarDomain half = fixtures::half_disc();
  std::vector<Fixture> list{
      {"disc", disc, BoundarySet{{fixtures::disc_arc(disc, 0.0, kPi)}}, 1.0 / 256, {0, 0.5}, {0, 1}, {0, -0.5}, {0, -1}},
      {"example1", ex1, BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::both)}}, 1.0 / 256, {0, 0.5}, {0, 0},
       {0, 0.5}, {0, 1}},
      {"half_disc", half, BoundarySet{{fixtures::diameter_arc(half, -1.0, 1.0)}}, 1.0 / 16, {0, 5}, {0, 0}, {0, 5},
       {0, 10}},
  };
  bool range = true, monotone = true, limits = true, harmonic = true;
  double worst_residual = 0.0;
  json rows = json::array();
  for (const Fixture& f : list) {
    GridConfig cfg;
    cfg.spacing = f.h;
    const GridSystem sys(f.domain, cfg);
    const auto sol = sys.solve(f.set);
    const auto wider = sys.solve(widen(f.domain, f.set, 0.1));
    bool f_range = true, f_mono = true;
    for (std::size_t i = 0; i < sol.nodal().size(); ++i) {
      const double v = sol.nodal()[i];
      f_range = f_range && v >= -1e-12 && v <= 1.0 + 1e-12;
      f_mono = f_mono && wider.nodal()[i] <= v + 1e-12;
    }
    // Values along paths into A and into the rest of the boundary, at
    // distances 1e-1, 3e-2, 1e-2 from the end point.
    std::vector<double> to_A, to_rest;
    for (double d : {0.1, 0.03, 0.01}) {
      const Point ua = (f.near_A_from - f.near_A_to) / std::abs(f.near_A_from - f.near_A_to);
      const Point ur = (f.near_rest_from - f.near_rest_to) / std::abs(f.near_rest_from - f.near_rest_to);
      to_A.push_back(sol.value(f.near_A_to + d * ua));
      to_rest.push_back(sol.value(f.near_rest_to + d * ur));
    }
    const bool f_limits = to_A[2] <= to_A[1] && to_A[1] <= to_A[0] && to_A[2] <= 0.05 && to_rest[2] >= to_rest[1] &&
                          to_rest[1] >= to_rest[0] && to_rest[2] >= 0.95;
    range = range && f_range;
    monotone = monotone && f_mono;
    limits = limits && f_limits;
    harmonic = harmonic && sol.residual() <= 1e-10 && wider.residual() <= 1e-10;
    worst_residual = std::max({worst_residual, sol.residual(), wider.residual()});
    rows.push_back({{"fixture", f.name}, {"h", f.h}, {"range", f_range}, {"monotone", f_mono}, {"toward_A", to_A},
                    {"toward_rest", to_rest}, {"residual", sol.residual()}});
  }
  WosConfig wcfg;
  wcfg.samples = 3000;
  wcfg.seed = o.seed;
  const std::vector<Point> pts{{0.1, 0.2}, {-0.5, 0.3}, {0.0, -0.8}, {0.6, 0.6}};
  wcfg.threads = 1;
  const ExitTable one = WosSampler(disc, wcfg).run(pts);
  wcfg.threads = 4;
  const ExitTable four = WosSampler(disc, wcfg).run(pts);
  bool identical = one.exits.size() == four.exits.size();
  for (std::size_t i = 0; identical && i < one.exits.size(); ++i) {
    const WalkExit &a = one.exits[i], &b = four.exits[i];
    identical = a.tag == b.tag && a.side == b.side && std::memcmp(&a.t, &b.t, sizeof a.t) == 0;
  }
  r.pass = range && monotone && limits && harmonic && identical;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  r.summary = std::string("range ") + yn(range) + ", set monotonicity " + yn(monotone) + ", boundary limits " +
              yn(limits) + ", residual " + fmt("%.1e", worst_residual) + " <= 1e-10, WoS 1 vs 4 threads identical " +
              yn(identical);
  r.details = {{"fixtures", rows}, {"wos_identical", identical}};
  return r;
}

}  // namespace

std::string CriterionResult::line() const {
  return "criterion " + std::to_string(id) + (pass ? " PASS " : " FAIL ") + name + ": " + summary + " (" +
         fmt("%.1f", seconds) + "s)";
}

json CriterionResult::to_json() const {
  return {{"id", id}, {"name", name}, {"pass", pass}, {"seconds", seconds}, {"summary", summary}, {"details", details}};
}

CriterionResult run(int id, const Options& options) {
  using Fn = CriterionResult (*)(const Options&);
  static constexpr Fn table[kCriteria] = {example2, closed_form, convergence, gluing, propc, separators, invariants};
  if (id < 1 || id > kCriteria) fail(ErrorCode::config_error, "no acceptance criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](options);
  } catch (const Error& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.summary = std::string("error ") + std::string(to_string(e.code())) + ": " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run(id, options));
  return out;
}

json report_json(const std::vector<CriterionResult>& results) {
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    rows.push_back(r.to_json());
    all = all && r.pass;
  }
  return {{"criteria", rows}, {"pass", all}};
}

}  // namespace crossenv::acceptance
