#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "crossenv/geometry.hpp"
#include "crossenv/json_io.hpp"
#include "crossenv/measure.hpp"

namespace crossenv {

/// The tuple (D, A, G, B) of a boundary cross.
struct CrossSpec {
  PlanarDomain D;
  BoundarySet A;
  PlanarDomain G;
  BoundarySet B;
};

/// A and B valid, nonempty and of positive length.
void validate(const CrossSpec& spec);
CrossSpec swapped(const CrossSpec& spec);

json spec_to_json(const CrossSpec& spec);
/// Members may be inline objects or file names relative to `base_dir`.
CrossSpec spec_from_json(const json& j, const std::filesystem::path& base_dir = {});

struct EngineConfig {
  Engine engine = Engine::grid;
  GridConfig grid;
  WosConfig wos;
  double error_budget = -1.0;  // negative: engine default (see budget())
  unsigned threads = 0;        // point-parallel interpolation; WoS uses wos.threads

  double budget() const;
};

/// Evaluates ω(·, A, D) with the configured engine. Grid factorisations are
/// cached per (domain, spacing) and solutions per (domain, set, spacing);
/// lookups take a shared lock, insertion an exclusive one.
class MeasureEvaluator {
 public:
  explicit MeasureEvaluator(EngineConfig cfg);

  struct Value {
    double value;
    double std_error;
  };

  std::vector<Value> evaluate(const PlanarDomain& domain, const BoundarySet& set, const std::vector<Point>& points);
  Value evaluate(const PlanarDomain& domain, const BoundarySet& set, Point z);

  std::shared_ptr<const GridSystem::Solution> grid_solution(const PlanarDomain& domain, const BoundarySet& set);
  std::shared_ptr<const GridSystem> grid_system(const PlanarDomain& domain);

  const EngineConfig& config() const { return cfg_; }
  std::size_t cached_systems() const;
  std::size_t cached_solutions() const;

 private:
  EngineConfig cfg_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const GridSystem>> systems_;
  std::map<std::string, std::shared_ptr<const GridSystem::Solution>> solutions_;
};

enum class Verdict { inside, outside, indeterminate };
std::string to_string(Verdict v);

struct Membership {
  Verdict verdict = Verdict::indeterminate;
  double margin = 0.0;  // 1 - ω(z,A,D) - ω(w,B,G)
  double std_error = 0.0;
  double omega_z = 0.0;
  double omega_w = 0.0;
};

/// Classifies (z, w) against Ŵ°. The verdict is indeterminate when
/// |margin| <= 3 stderr + error budget.
Membership envelope_membership(const CrossSpec& spec, Point z, Point w, MeasureEvaluator& eval);

struct EnvelopeSlice {
  bool fixed_in_G = true;  // true: w is fixed and points range over D
  Point fixed_point;
  double fixed_value = 0.0;
  std::vector<Point> points;
  std::vector<double> margin;
  std::vector<double> std_error;
  std::vector<Verdict> verdict;
  std::vector<bool> mask;  // margin > 0

  std::size_t inside_count() const;
  std::size_t indeterminate_count() const;
};

EnvelopeSlice envelope_slice(const CrossSpec& spec, Point w, const std::vector<Point>& z_points,
                             MeasureEvaluator& eval);
EnvelopeSlice envelope_slice_fixed_z(const CrossSpec& spec, Point z, const std::vector<Point>& w_points,
                                     MeasureEvaluator& eval);

/// Columns x,y,margin,mask; one leading '#' comment line when given.
std::string slice_to_csv(const EnvelopeSlice& slice, const std::string& comment = {});
json slice_summary(const CrossSpec& spec, const EnvelopeSlice& slice);

/// Points of an nx-by-ny lattice over the domain's bounding box that lie in
/// the domain at distance >= min_distance from its boundary.
std::vector<Point> interior_grid(const PlanarDomain& domain, int nx, int ny, double min_distance = 0.0);

/// A_k = A widened by 1/k on each side, for each k.
std::vector<std::pair<int, BoundarySet>> neighborhood_family(const PlanarDomain& domain, const BoundarySet& set,
                                                             const std::vector<int>& ks);

struct ConvergenceReport {
  std::vector<int> ks;
  std::vector<Point> points;
  std::vector<double> limit;                 // ω(z, A, D)
  std::vector<std::vector<double>> values;   // [k][point] ω(z, A_k, D)
  std::vector<std::vector<double>> errors;   // [k][point] stderr
  std::vector<double> discrepancy;           // sup over points of |ω_k - ω|
  double residual_length = 0.0;              // length(A_kmax) - length(A)
  bool monotone = false;
  bool discrepancy_decreasing = false;

  bool pass() const { return monotone && discrepancy_decreasing; }
  json to_json() const;
};

/// family must be ordered by increasing k with A ⊆ A_{k'} ⊆ A_k for k < k'
/// (checked; NotNested otherwise).
ConvergenceReport check_monotone_convergence(const PlanarDomain& domain, const BoundarySet& set,
                                             const std::vector<std::pair<int, BoundarySet>>& family,
                                             const std::vector<Point>& points, MeasureEvaluator& eval);

}  // namespace crossenv
