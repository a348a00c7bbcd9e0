#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "crossenv/acceptance.hpp"
#include "crossenv/construct.hpp"
#include "crossenv/envelope.hpp"
#include "crossenv/fixtures.hpp"

namespace crossenv::cli {

namespace fs = std::filesystem;

Point parse_point(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  static const std::regex real_only(R"(^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$)");
  static const std::regex imag_only(R"(^([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?|[+-])?i$)");
  static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i$)");
  std::smatch m;
  if (std::regex_match(s, real_only)) return {std::stod(s), 0.0};
  auto imag = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (std::regex_match(s, m, full)) return {std::stod(m[1].str()), imag(m[2].str())};
  if (std::regex_match(s, imag_only)) return {0.0, imag(s.substr(0, s.size() - 1))};
  fail(ErrorCode::config_error, "cannot parse point '" + text + "'");
}

std::pair<int, int> parse_eval_grid(const std::string& text) {
  static const std::regex re(R"(^(\d+)[xX](\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) fail(ErrorCode::config_error, "eval grid must look like NxM, got '" + text + "'");
  const int nx = std::stoi(m[1].str()), ny = std::stoi(m[2].str());
  if (nx < 1 || ny < 1 || nx > 4096 || ny > 4096) fail(ErrorCode::config_error, "eval grid out of range");
  return {nx, ny};
}

namespace {

struct Common {
  std::string engine = "grid";
  long samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  double spacing = 1.0 / 256.0;
  unsigned threads = 0;
  bool json_out = false;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool engine_flags = true) {
  if (engine_flags) {
    cmd->add_option("--engine", c.engine, "closed_form, grid or wos")->capture_default_str();
    cmd->add_option("--samples", c.samples, "walks per point (wos)")->capture_default_str();
    cmd->add_option("--grid-spacing", c.spacing, "grid spacing h")->capture_default_str();
  }
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores)")->capture_default_str();
  cmd->add_flag("--json", c.json_out, "machine-readable summary on stdout");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
}

EngineConfig engine_config(const Common& c) {
  EngineConfig e;
  e.engine = parse_engine(c.engine);
  e.grid.spacing = c.spacing;
  e.wos.samples = c.samples;
  e.wos.seed = c.seed;
  e.wos.threads = c.threads;
  e.threads = c.threads;
  if (!(c.spacing > 0.0)) fail(ErrorCode::config_error, "grid spacing must be positive");
  return e;
}

json engine_json(const Common& c) {
  return {{"engine", c.engine}, {"samples", c.samples}, {"grid_spacing", c.spacing}, {"seed", c.seed}};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Output document: result plus provenance. The timestamp is kept under
/// metadata so reruns can be compared with it removed.
json envelope_doc(const std::string& command, const json& config, std::uint64_t seed, json result) {
  return {{"command", command},
          {"toolkit_version", kToolkitVersion},
          {"config_hash", config_hash(config)},
          {"seed", seed},
          {"config", config},
          {"result", std::move(result)},
          {"metadata", {{"timestamp", timestamp()}}}};
}

std::string csv_comment(const json& config, std::uint64_t seed) {
  return "crossenv " + std::string(kToolkitVersion) + " config_hash=" + config_hash(config) +
         " seed=" + std::to_string(seed);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::vector<Point> load_points(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_array()) fail(ErrorCode::config_error, "points file must hold an array of [x, y]");
  std::vector<Point> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return pts;
}

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ks.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(ErrorCode::config_error, "bad k list '" + text + "'");
    }
  }
  if (ks.empty()) fail(ErrorCode::config_error, "empty k list");
  return ks;
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_curve:
    case ErrorCode::invalid_domain:
    case ErrorCode::invalid_set:
    case ErrorCode::invalid_input:
    case ErrorCode::degenerate_set:
    case ErrorCode::type_mismatch:
    case ErrorCode::not_nested:
    case ErrorCode::point_on_boundary:
    case ErrorCode::ambiguous_point:
      return config;
    case ErrorCode::no_convergence:
    case ErrorCode::step_budget_exceeded:
    case ErrorCode::grid_too_coarse:
      return numerical;
    case ErrorCode::no_witness:
      return no_witness;
    default:
      return failure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic measures, boundary-cross envelopes and their approximating domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolkitVersion);

  Common c;
  std::string domain_file, set_file, spec_file, points_file, eval_grid = "32x32", slice = "w=0+0i";
  std::string ks_text = "1,2,4,8,16,32,64", fixture = "ball", z_text, w_text, suite = "acceptance", dir = ".";
  double min_distance = -1.0, tolerance = 1e-2, radius = 0.05, tol = 1e-3;
  double cap = 0.3, amplitude = 0.1, width = 0.15;
  int k = 20, grid = 21, k_max = 64, probes = 64;
  std::vector<int> criteria;

  auto* measure = app.add_subcommand("measure", "harmonic measure field as CSV");
  measure->add_option("--domain", domain_file, "domain JSON")->required()->check(CLI::ExistingFile);
  measure->add_option("--set", set_file, "boundary set JSON")->required()->check(CLI::ExistingFile);
  measure->add_option("--points", points_file, "points JSON [[x,y],...]")->check(CLI::ExistingFile);
  measure->add_option("--eval-grid", eval_grid, "lattice NxM over the bounding box")->capture_default_str();
  measure->add_option("--min-distance", min_distance, "skip lattice points closer to the boundary");
  add_common(measure, c);

  auto* envelope = app.add_subcommand("envelope", "envelope slice as CSV with a JSON summary");
  envelope->add_option("--spec", spec_file, "cross spec JSON")->required()->check(CLI::ExistingFile);
  envelope->add_option("--slice", slice, "fixed coordinate, w=a+bi or z=a+bi")->capture_default_str();
  envelope->add_option("--eval-grid", eval_grid, "lattice NxM over the free factor")->capture_default_str();
  envelope->add_option("--min-distance", min_distance, "skip lattice points closer to the boundary (default 0.05)");
  add_common(envelope, c);

  auto* converge = app.add_subcommand("converge", "monotone convergence of ω(z, A_k, D)");
  converge->add_option("--domain", domain_file, "domain JSON")->required()->check(CLI::ExistingFile);
  converge->add_option("--set", set_file, "boundary set JSON")->required()->check(CLI::ExistingFile);
  converge->add_option("--ks", ks_text, "comma-separated k values")->capture_default_str();
  converge->add_option("--points", points_file, "points JSON")->check(CLI::ExistingFile);
  converge->add_option("--eval-grid", eval_grid, "lattice NxM")->capture_default_str();
  add_common(converge, c);

  auto* glue = app.add_subcommand("glue", "build D_k and check the gluing identity");
  glue->add_option("--domain", domain_file, "domain JSON")->required()->check(CLI::ExistingFile);
  glue->add_option("--set", set_file, "A_k as a boundary set JSON")->required()->check(CLI::ExistingFile);
  glue->add_option("--k", k, "index k")->capture_default_str();
  glue->add_option("--points", points_file, "sample points JSON")->check(CLI::ExistingFile);
  glue->add_option("--eval-grid", eval_grid, "sample lattice NxM")->capture_default_str();
  glue->add_option("--tolerance", tolerance, "pass threshold")->capture_default_str();
  add_common(glue, c);

  auto* propc = app.add_subcommand("propc", "level-set sequence and hypothesis (H) report");
  propc->add_option("--fixture", fixture, "disc (C^1) or ball (C^2)")
      ->check(CLI::IsMember({"disc", "ball"}))
      ->capture_default_str();
  propc->add_option("--grid", grid, "samples per axis")->capture_default_str();
  propc->add_option("--ks", ks_text, "comma-separated k values (default 1..64 sweep)");
  propc->add_option("--tol", tol, "distance tolerance")->capture_default_str();
  propc->add_option("--cap", cap, "cap threshold c")->capture_default_str();
  propc->add_option("--amplitude", amplitude, "λ amplitude")->capture_default_str();
  propc->add_option("--width", width, "λ transition width")->capture_default_str();
  add_common(propc, c, false);

  auto* separator = app.add_subcommand("separator", "separating-domain witness near a point");
  separator->add_option("--spec", spec_file, "cross spec JSON")->required()->check(CLI::ExistingFile);
  separator->add_option("--z", z_text, "z0 as a+bi")->required();
  separator->add_option("--w", w_text, "w0 as a+bi")->required();
  separator->add_option("--radius", radius, "query ball radius")->capture_default_str();
  separator->add_option("--k-max", k_max, "largest k")->capture_default_str();
  separator->add_option("--probes", probes, "random probes in the ball")->capture_default_str();
  separator->add_option("--tol", tol, "level and boundary tolerance")->capture_default_str();
  add_common(separator, c);

  auto* validate_cmd = app.add_subcommand("validate", "acceptance battery");
  validate_cmd->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"acceptance"}))->capture_default_str();
  validate_cmd->add_option("--criterion", criteria, "run only these criteria (1-7)");
  add_common(validate_cmd, c, false);

  auto* fixtures_cmd = app.add_subcommand("fixtures", "write the bundled fixture files");
  fixtures_cmd->group("");
  fixtures_cmd->add_option("--dir", dir, "target directory")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return config;
  }

  try {
    auto domain_points = [&](const PlanarDomain& d, double default_min) {
      if (!points_file.empty()) return load_points(points_file);
      const auto [nx, ny] = parse_eval_grid(eval_grid);
      return interior_grid(d, nx, ny, min_distance >= 0.0 ? min_distance : default_min);
    };

    if (*measure) {
      const json dj = load_json(domain_file), sj = load_json(set_file);
      const PlanarDomain d = domain_from_json(dj);
      const BoundarySet s = set_from_json(sj);
      validate(d, s);
      const auto pts = domain_points(d, 0.0);
      const json cfg = {{"command", "measure"}, {"domain", dj}, {"set", sj}, {"engine", engine_json(c)},
                        {"points", points_file.empty() ? json(eval_grid) : load_json(points_file)},
                        {"min_distance", min_distance}};
      MeasureEvaluator eval(engine_config(c));
      MeasureField field;
      field.engine = eval.config().engine;
      field.points = pts;
      for (const auto& v : eval.evaluate(d, s, pts)) {
        field.values.push_back(v.value);
        field.std_error.push_back(v.std_error);
      }
      const std::string csv = field_to_csv(field, csv_comment(cfg, c.seed));
      if (c.json_out) {
        if (!c.out.empty()) write_text(c.out, csv);
        double lo = 1.0, hi = 0.0;
        for (double v : field.values) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        json result = {{"points", pts.size()}, {"min", lo}, {"max", hi}, {"engine", to_string(field.engine)}};
        if (!c.out.empty()) result["csv"] = c.out;
        out << envelope_doc("measure", cfg, c.seed, result).dump(2) << "\n";
      } else {
        emit(csv, c.out, out);
      }
      return ok;
    }

    if (*envelope) {
      const json sj = load_json(spec_file);
      const CrossSpec spec = spec_from_json(sj, fs::path(spec_file).parent_path());
      static const std::regex re(R"(^\s*([zw])\s*=\s*(.+)$)");
      std::smatch m;
      if (!std::regex_match(slice, m, re)) fail(ErrorCode::config_error, "slice must be w=a+bi or z=a+bi");
      const bool fixed_w = m[1].str() == "w";
      const Point fixed = parse_point(m[2].str());
      const auto pts = domain_points(fixed_w ? spec.D : spec.G, 0.05);
      const json cfg = {{"command", "envelope"}, {"spec", sj}, {"slice", slice}, {"engine", engine_json(c)},
                        {"points", points_file.empty() ? json(eval_grid) : load_json(points_file)},
                        {"min_distance", min_distance}};
      MeasureEvaluator eval(engine_config(c));
      const EnvelopeSlice s = fixed_w ? envelope_slice(spec, fixed, pts, eval) : envelope_slice_fixed_z(spec, fixed, pts, eval);
      const std::string csv = slice_to_csv(s, csv_comment(cfg, c.seed));
      json summary = slice_summary(spec, s);
      if (c.json_out) {
        if (!c.out.empty()) {
          write_text(c.out, csv);
          summary["csv"] = c.out;
        }
        out << envelope_doc("envelope", cfg, c.seed, summary).dump(2) << "\n";
      } else {
        emit(csv, c.out, out);
        if (!c.out.empty()) out << summary.dump(2) << "\n";
      }
      return ok;
    }

    if (*converge) {
      const json dj = load_json(domain_file), sj = load_json(set_file);
      const PlanarDomain d = domain_from_json(dj);
      const BoundarySet s = set_from_json(sj);
      const auto ks = parse_ks(ks_text);
      const auto pts = domain_points(d, 0.05);
      const json cfg = {{"command", "converge"}, {"domain", dj}, {"set", sj}, {"ks", ks}, {"engine", engine_json(c)},
                        {"points", points_file.empty() ? json(eval_grid) : load_json(points_file)}};
      MeasureEvaluator eval(engine_config(c));
      const ConvergenceReport rep = check_monotone_convergence(d, s, neighborhood_family(d, s, ks), pts, eval);
      const std::string text = envelope_doc("converge", cfg, c.seed, rep.to_json()).dump(2) + "\n";
      emit(text, c.out, out);
      if (!c.out.empty() && !c.json_out) out << "monotone " << rep.monotone << ", discrepancy decreasing " << rep.discrepancy_decreasing << "\n";
      return ok;
    }

    if (*glue) {
      const json dj = load_json(domain_file), sj = load_json(set_file);
      const PlanarDomain d = domain_from_json(dj);
      const BoundarySet s = set_from_json(sj);
      if (eval_grid == "32x32" && points_file.empty()) eval_grid = "4x4";
      const auto pts = domain_points(d, 0.1);
      const json cfg = {{"command", "glue"}, {"domain", dj}, {"set", sj}, {"k", k}, {"engine", engine_json(c)},
                        {"points", points_file.empty() ? json(eval_grid) : load_json(points_file)},
                        {"tolerance", tolerance}};
      const DkResult dk = build_Dk_detailed(d, s, k);
      GridConfig g;
      g.spacing = c.spacing;
      const GluingReport rep = verify_gluing(d, s, dk, pts, g, tolerance);
      json companions = json::array();
      for (const auto& cc : dk.companions) {
        companions.push_back({{"arc", arc_to_json(cc.base_arc)}, {"closed", cc.closed}, {"sup_offset", cc.sup_offset},
                              {"pocket_area", cc.pocket_area()},
                              {"checks", {{"endpoints_pinned", cc.checks.endpoints_pinned},
                                          {"offset_within", cc.checks.offset_within},
                                          {"pocket_disjoint", cc.checks.pocket_disjoint}}}});
      }
      json result = rep.to_json();
      result["area_D"] = d.area();
      result["area_Dk"] = dk.domain.area();
      result["companions"] = companions;
      result["welded"] = set_to_json(BoundarySet{dk.welded});
      emit(envelope_doc("glue", cfg, c.seed, result).dump(2) + "\n", c.out, out);
      return rep.pass() ? ok : failure;
    }

    if (*propc) {
      PropCOptions opt;
      opt.grid = grid;
      opt.tol = tol;
      opt.threads = c.threads;
      if (propc->count("--ks") > 0) opt.ks = parse_ks(ks_text);
      const LevelSetDomain base = ball_with_cap(fixture == "disc" ? 1 : 2, cap, amplitude, width);
      const json cfg = {{"command", "propc"}, {"fixture", fixture}, {"grid", grid}, {"ks", opt.ks}, {"tol", tol},
                        {"cap", cap}, {"amplitude", amplitude}, {"width", width}};
      const PropCReport rep = build_propC_sequence(base, opt).report;
      emit(envelope_doc("propc", cfg, c.seed, rep.to_json()).dump(2) + "\n", c.out, out);
      return rep.pass() ? ok : failure;
    }

    if (*separator) {
      const json sj = load_json(spec_file);
      const CrossSpec spec = spec_from_json(sj, fs::path(spec_file).parent_path());
      const SeparatorQuery q{parse_point(z_text), parse_point(w_text), radius};
      SeparatorOptions opt;
      opt.k_max = k_max;
      opt.tol = tol;
      opt.probes = probes;
      opt.seed = c.seed;
      const json cfg = {{"command", "separator"}, {"spec", sj}, {"z", z_text}, {"w", w_text}, {"radius", radius},
                        {"k_max", k_max}, {"probes", probes}, {"tol", tol}, {"engine", engine_json(c)}};
      MeasureEvaluator eval(engine_config(c));
      try {
        const SeparatorWitness w = find_separator(spec, q, eval, opt);
        emit(envelope_doc("separator", cfg, c.seed, w.to_json()).dump(2) + "\n", c.out, out);
        return ok;
      } catch (const NoWitness& e) {
        const json result = {{"error", "NoWitness"}, {"message", e.what()}, {"diagnostics", e.diagnostics()}};
        const std::string text = envelope_doc("separator", cfg, c.seed, result).dump(2) + "\n";
        out << text;
        if (!c.out.empty()) write_text(c.out, text);
        return no_witness;
      }
    }

    if (*validate_cmd) {
      acceptance::Options opt;
      opt.seed = c.seed;
      opt.threads = c.threads;
      std::vector<acceptance::CriterionResult> results;
      if (criteria.empty()) {
        for (int id = 1; id <= acceptance::kCriteria; ++id) criteria.push_back(id);
      }
      for (int id : criteria) {
        results.push_back(acceptance::run(id, opt));
        if (!c.json_out) out << results.back().line() << std::endl;
      }
      const json rep = acceptance::report_json(results);
      const json cfg = {{"command", "validate"}, {"suite", suite}, {"criteria", criteria}, {"seed", c.seed}};
      json doc = envelope_doc("validate", cfg, c.seed, rep);
      for (auto& row : doc["result"]["criteria"]) {
        doc["metadata"]["seconds"][std::to_string(row["id"].get<int>())] = row["seconds"];
        row.erase("seconds");
      }
      if (c.json_out) out << doc.dump(2) << "\n";
      if (!c.out.empty()) write_text(c.out, doc.dump(2) + "\n");
      return rep["pass"].get<bool>() ? ok : failure;
    }

    if (*fixtures_cmd) {
      const fs::path base(dir);
      fs::create_directories(base);
      const PlanarDomain disc = fixtures::unit_disc();
      const PlanarDomain half = fixtures::half_disc();
      auto put = [&](const char* name, const json& j) {
        write_text(base / name, j.dump(1) + "\n");
        out << (base / name).string() << "\n";
      };
      put("disc.json", domain_to_json(disc));
      put("disc_arc.json", set_to_json(BoundarySet{{fixtures::disc_arc(disc, 0.0, std::numbers::pi / 2)}}));
      put("disc_half_arc.json", set_to_json(BoundarySet{{fixtures::disc_arc(disc, 0.0, std::numbers::pi)}}));
      put("half_disc.json", domain_to_json(half));
      put("half_disc_interval.json", set_to_json(BoundarySet{{fixtures::diameter_arc(half, -1.0, 1.0)}}));
      put("example1.json", domain_to_json(fixtures::example1()));
      put("example1_slit_arc.json", set_to_json(BoundarySet{{fixtures::slit_arc(-0.25, 0.25, Side::both)}}));
      put("example2.json", {{"D", "example1.json"}, {"A", "example1_slit_arc.json"}, {"G", "disc.json"},
                            {"B", set_to_json(whole_boundary(disc))}});
      put("half_arc_cross.json",
          {{"D", "disc.json"}, {"A", "disc_half_arc.json"}, {"G", "disc.json"}, {"B", "disc_half_arc.json"}});
      return ok;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
  return config;
}

}  // namespace crossenv::cli
