#include <algorithm>
#include <cmath>

#include "crossenv/construct.hpp"

namespace crossenv {

json GluingReport::to_json() const {
  json rows = json::array();
  for (const auto& s : samples) {
    rows.push_back({{"point", point_to_json(s.z)}, {"on_D", s.on_D}, {"on_Dk", s.on_Dk},
                    {"discrepancy", std::abs(s.on_D - s.on_Dk)}});
  }
  return {{"k", k},
          {"spacing", spacing},
          {"samples", rows},
          {"max_discrepancy", max_discrepancy},
          {"tolerance", tolerance},
          {"pass", pass()}};
}

GluingReport verify_gluing(const PlanarDomain& domain, const BoundarySet& Ak, const DkResult& Dk,
                           const std::vector<Point>& samples, const GridConfig& cfg, double tolerance) {
  if (samples.empty()) fail(ErrorCode::invalid_input, "no sample points");
  for (const Point& z : samples) {
    if (!domain.contains(z, 0.0)) fail(ErrorCode::invalid_input, "gluing sample is not inside D");
  }
  require_nondegenerate(domain, Ak);

  // A_k is interior to D_k: every piece of it becomes a zero barrier.
  std::vector<std::vector<Point>> barriers;
  for (const auto& cc : Dk.companions) barriers.push_back(arc_polyline(domain, cc.base_arc));
  for (const auto& arc : Dk.welded) barriers.push_back(arc_polyline(domain, arc));

  const auto on_D = GridSystem(domain, cfg).solve(Ak);
  const auto on_Dk = GridSystem(Dk.domain, cfg, std::move(barriers)).solve(BoundarySet{});

  GluingReport report;
  report.k = Dk.k;
  report.spacing = cfg.spacing;
  report.tolerance = tolerance;
  for (const Point& z : samples) {
    GluingSample s{z, on_D.value(z), on_Dk.value(z)};
    report.max_discrepancy = std::max(report.max_discrepancy, std::abs(s.on_D - s.on_Dk));
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace crossenv
