#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crossenv/envelope.hpp"
#include "crossenv/error.hpp"
#include "crossenv/geometry.hpp"
#include "crossenv/json_io.hpp"
#include "crossenv/measure.hpp"

namespace crossenv {

// ------------------------------------------------------------ companion curves

/// Offset curve Γ of a type-1 boundary arc together with the pocket Δ
/// bounded by the arc and Γ. For a whole closed curve Γ is closed and the
/// pocket is the annulus between the two curves.
struct CompanionCurve {
  BoundaryArc base_arc;
  Curve offset;
  std::vector<Curve> pocket;  // one closed curve, or {outer ring, inner ring} for an annulus
  int k = 1;
  bool closed = false;
  std::vector<double> params;  // base parameters matched with offset vertices
  double sup_offset = 0.0;
  double base_period = 0.0;  // length of the base curve

  struct Checks {
    bool endpoints_pinned = false;
    bool offset_within = false;   // sup distance < 1/k
    bool pocket_disjoint = false; // Δ ∩ D = ∅
  } checks;

  /// Γ at base parameter t (piecewise linear in t).
  Point at(double t) const;
  double pocket_area() const;
};

/// Outward normal offset with endpoints pinned:
/// δ(t) = min(1/(2k), clearance/2) tapered by sin(π s) on open arcs,
/// constant on whole curves. Throws type_mismatch for slit arcs,
/// no_clearance when the outward clearance drops below 1/(4k) or the
/// pocket fails its checks.
CompanionCurve build_companion(const PlanarDomain& domain, const BoundaryArc& arc, int k);

struct DkResult {
  PlanarDomain domain;
  int k = 0;
  std::vector<CompanionCurve> companions;  // type-1 components
  std::vector<BoundaryArc> welded;         // type-2 components merged into D_k
};

/// D_k = D ∪ ⋃(Δ ∪ A_kl). Type-1 components are replaced by their companion
/// curves; type-2 components (slit pieces) are removed from the slit, which
/// joins the two sides of the domain across them.
DkResult build_Dk_detailed(const PlanarDomain& domain, const BoundarySet& Ak, int k);
PlanarDomain build_Dk(const PlanarDomain& domain, const BoundarySet& Ak, int k);

/// Connected pieces of a set as arcs: one per merged interval on
/// outer/hole curves, one per merged interval of the union of both faces on
/// slits.
std::vector<BoundaryArc> components(const PlanarDomain& domain, const BoundarySet& set);

// ---------------------------------------------------------------- gluing check

struct GluingSample {
  Point z;
  double on_D = 0.0;   // ω(z, A_k, D)
  double on_Dk = 0.0;  // ω(z, A_k, D_k), A_k kept as a zero obstacle
};

struct GluingReport {
  int k = 0;
  double spacing = 0.0;
  std::vector<GluingSample> samples;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;

  bool pass() const { return max_discrepancy <= tolerance; }
  json to_json() const;
};

/// Both measures by the grid engine. On D_k the arcs of A_k are interior
/// zero-valued barriers that cut grid edges from either side.
GluingReport verify_gluing(const PlanarDomain& domain, const BoundarySet& Ak, const DkResult& Dk,
                           const std::vector<Point>& samples, const GridConfig& cfg, double tolerance = 1e-2);

// ------------------------------------------------------- level-set sequences

using ScalarField = std::function<double(const std::vector<double>&)>;

/// Domain {ρ < 0} in C^n ≅ R^{2n} (coordinates x1, y1, ..., xn, yn) with the
/// perturbation λ; the k-th member is D_k = D ∪ {ρ - λ/k < 0}. Sampling is
/// restricted to the cube [lo, hi]^{2n}, and D must be star-shaped about
/// the cube centre.
struct LevelSetDomain {
  int n = 1;
  ScalarField rho;
  ScalarField lam;
  double lo = -1.0;
  double hi = 1.0;
  int k = 1;

  double phi(const std::vector<double>& x) const { return rho(x) - lam(x) / k; }
  bool contains(const std::vector<double>& x) const { return rho(x) < 0.0 || phi(x) < 0.0; }
};

struct PropCOptions {
  std::vector<int> ks{1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  int grid = 21;             // samples per axis
  double tol = 1e-3;         // distance tolerance for the intersection check
  double fd_step_rel = 1e-4; // finite-difference step relative to the cube size
  unsigned threads = 0;
};

struct PropCEntry {
  int k = 0;
  bool nesting = false;       // D_{k'} ⊆ D_k for the next tested k'
  bool trace = false;         // D_k ∩ closure(D) = D ∪ A on samples
  bool intersection = false;  // far points outside D ∪ A excluded by some k' <= k
  double levi_min_eig = 0.0;  // over sampled ∂D_k points
  bool pass() const { return nesting && trace && levi_min_eig > 0.0; }
};

struct PropCReport {
  int n = 1;
  int grid = 0;
  std::vector<PropCEntry> entries;
  int N = -1;  // smallest tested k from which every entry passes; -1 if none
  bool lambda_in_range = false;
  bool degenerate = false;     // λ vanishes on every sample (A = ∅)
  double rho_levi_min = 0.0;   // ρ's Levi form on sampled boundary points of A
  std::size_t samples = 0;
  std::size_t rays = 0;
  std::size_t trace_skipped = 0;  // boundary samples with λ/k below round-off

  bool pass() const;
  json to_json() const;
};

struct PropCResult {
  std::vector<LevelSetDomain> domains;
  PropCReport report;
};

/// Throws not_strongly_pseudoconvex when no tested k reaches a positive
/// Levi form.
PropCResult build_propC_sequence(const LevelSetDomain& base, const PropCOptions& options = {});

/// Smallest Levi-form eigenvalue of f at x, restricted to the complex
/// tangent space of its level set when n >= 2 (Δf/4 when n = 1).
double levi_min_eigenvalue(const ScalarField& f, const std::vector<double>& x, int n, double step);

/// Unit ball of C^n with ρ = |z|^2 - 1 and λ = amplitude * S((x1/|x| - c) / width)
/// for a C^2 smooth step S; A is the cap x1/|x| > c of the sphere.
LevelSetDomain ball_with_cap(int n, double c = 0.3, double amplitude = 0.1, double width = 0.15);

// ------------------------------------------------------------------ separators

enum class WitnessKind { cross_envelope_k, product_k };
std::string to_string(WitnessKind kind);

struct SeparatorWitness {
  WitnessKind kind = WitnessKind::cross_envelope_k;
  int k = 0;
  Point z;
  Point w;
  double boundary_residual = 0.0;
  std::string route;  // which case produced it

  json to_json() const;
};

struct SeparatorQuery {
  Point z0;
  Point w0;
  double radius = 0.05;  // query set U = ball of this radius in C^2
};

struct SeparatorOptions {
  std::vector<int> ks;  // empty: 1..k_max
  int k_max = 64;
  double tol = 1e-3;
  int probes = 64;
  std::uint64_t seed = kDefaultSeed;
};

/// Raised when no tested k yields a witness; carries the per-k reasons.
class NoWitness : public Error {
 public:
  NoWitness(const std::string& what, json diagnostics);
  const json& diagnostics() const { return diagnostics_; }

 private:
  json diagnostics_;
};

/// Looks for a point of U on the boundary of Ω_k (level set of the k-th
/// cross measure sum, interior case) or of D_k × G_k (boundary case), in
/// that order, over increasing k. A_k and B_k are the 1/k widenings.
SeparatorWitness find_separator(const CrossSpec& spec, const SeparatorQuery& query, MeasureEvaluator& eval,
                                const SeparatorOptions& options = {});

}  // namespace crossenv
