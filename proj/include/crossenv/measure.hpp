#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crossenv/geometry.hpp"
#include "crossenv/json_io.hpp"

namespace crossenv {

enum class Engine { closed_form, grid, wos };

std::string to_string(Engine engine);
Engine parse_engine(const std::string& text);

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Sampled values of ω(·, A, D) with per-point standard errors.
struct MeasureField {
  std::vector<Point> points;
  std::vector<double> values;
  std::vector<double> std_error;  // 0 for deterministic engines
  Engine engine = Engine::grid;
};

/// CSV with columns x,y,value,stderr,engine. `comment` (if nonempty) is
/// written first as a single '#' line.
std::string field_to_csv(const MeasureField& field, const std::string& comment = {});

struct GridConfig {
  double spacing = 1.0 / 256.0;
  int max_iters = 8;  // iterative-refinement sweeps after the direct solve
  double residual_tol = 1e-10;
};

struct WosConfig {
  double epsilon_shell = 0.0;  // 0 selects 1e-4 * diameter
  long max_steps = 100000;
  long samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  int retry_cap = 3;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Rejects sets that are invalid or of zero total length.
void require_nondegenerate(const PlanarDomain& domain, const BoundarySet& set);

// ---------------------------------------------------------------- closed forms

/// ω(z, A, E) for the unit disc E with A a union of arcs given as angle
/// intervals (a, b), b > a. Intervals may overlap and wrap.
double disc_arc_measure(Point z, const std::vector<std::pair<double, double>>& arcs);

/// ω(z, A, H) for the upper half-plane with A a union of bounded real
/// intervals.
double halfplane_interval_measure(Point z, const std::vector<std::pair<double, double>>& intervals);

/// Closed-form engine for domains recognised by detect_circle(): the
/// polygonal boundary is identified with its circumcircle and arcs are mapped
/// to angles. Throws invalid_input for other domains.
MeasureField closed_form_measure(const PlanarDomain& domain, const BoundarySet& set, const std::vector<Point>& points);

// ------------------------------------------------------------------- grid

/// Shifted-boundary five-point discretisation on an origin-aligned square
/// grid. Grid edges cut by the boundary get a shortened arm ending at the
/// cut point, so slits act as zero-width barriers with separate data per
/// face. The matrix does not depend on A; one factorisation serves every
/// boundary set.
///
/// Boundary values at a cut point average the set indicator over an arc
/// window of length h, which keeps arc endpoints at their true position.
///
/// Obstacles are extra polylines inside the domain carrying value 0. They
/// cut grid edges like the boundary does; nodes lying on them are fixed to 0.
class GridSystem {
 public:
  GridSystem(const PlanarDomain& domain, const GridConfig& cfg, std::vector<std::vector<Point>> obstacles = {});

  class Solution;
  Solution solve(const BoundarySet& set) const;

  const PlanarDomain& domain() const;
  const GridConfig& config() const;
  std::size_t unknowns() const;
  /// Unknowns adjacent to the boundary through at least one cut edge.
  std::size_t cut_nodes() const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

class GridSystem::Solution {
 public:
  Solution(std::shared_ptr<const Impl> impl, BoundarySet set, std::vector<double> nodal, double residual,
           int refinements);

  /// Interpolated value at a point of D, clamped to [0, 1].
  double value(Point z) const;
  MeasureField field(const std::vector<Point>& points) const;

  /// Diagonal-scaled max residual max_i |b_i - (Au)_i| / A_ii.
  double residual() const { return residual_; }
  int refinements() const { return refinements_; }
  const std::vector<double>& nodal() const { return nodal_; }
  /// Grid node positions in unknown order.
  std::vector<Point> node_points() const;

 private:
  std::shared_ptr<const Impl> impl_;
  SetIndicator indicator_;
  std::vector<double> nodal_;
  double residual_;
  int refinements_;
};

MeasureField grid_measure(const PlanarDomain& domain, const BoundarySet& set, const GridConfig& cfg,
                          const std::vector<Point>& points);

// -------------------------------------------------------------- walk on spheres

/// Where one walk ended: boundary curve tag, arc-length parameter and face.
struct WalkExit {
  std::uint32_t tag;
  Side side;
  double t;
};

/// Exit records for every (point, sample); reusable across boundary sets
/// because the walks do not depend on A.
struct ExitTable {
  std::vector<Point> points;
  long samples = 0;
  std::vector<WalkExit> exits;  // points.size() * samples, point-major
  long retried_walks = 0;
};

class WosSampler {
 public:
  WosSampler(const PlanarDomain& domain, const WosConfig& cfg);

  ExitTable run(const std::vector<Point>& points) const;
  double epsilon() const { return eps_; }

 private:
  const PlanarDomain* domain_;
  WosConfig cfg_;
  double eps_;
};

MeasureField evaluate_exits(const PlanarDomain& domain, const ExitTable& table, const BoundarySet& set);

MeasureField wos_measure(const PlanarDomain& domain, const BoundarySet& set, const WosConfig& cfg,
                         const std::vector<Point>& points);

// ------------------------------------------------------------ cross validation

struct CrossValidationRow {
  Point z;
  std::optional<double> closed_form;
  double grid = 0.0;
  double wos = 0.0;
  double wos_stderr = 0.0;
  double discrepancy = 0.0;  // |grid - wos|
  bool flagged = false;      // discrepancy > 3 stderr + grid budget
};

struct CrossValidationReport {
  std::vector<CrossValidationRow> rows;
  double grid_error_budget = 0.0;
  bool all_clear() const;
  json to_json() const;
};

CrossValidationReport cross_validate(const PlanarDomain& domain, const BoundarySet& set,
                                     const std::vector<Point>& points, const GridConfig& grid,
                                     const WosConfig& wos, double grid_error_budget = 2e-3);

}  // namespace crossenv
