#include <cmath>

#include "crossenv/measure.hpp"

namespace crossenv {

bool CrossValidationReport::all_clear() const {
  for (const auto& row : rows) {
    if (row.flagged) return false;
  }
  return true;
}

json CrossValidationReport::to_json() const {
  json out;
  out["grid_error_budget"] = grid_error_budget;
  out["rows"] = json::array();
  for (const auto& row : rows) {
    json r{{"z", point_to_json(row.z)},
           {"grid", row.grid},
           {"wos", row.wos},
           {"wos_stderr", row.wos_stderr},
           {"discrepancy", row.discrepancy},
           {"flagged", row.flagged}};
    r["closed_form"] = row.closed_form ? json(*row.closed_form) : json(nullptr);
    out["rows"].push_back(r);
  }
  out["pass"] = all_clear();
  return out;
}

CrossValidationReport cross_validate(const PlanarDomain& domain, const BoundarySet& set,
                                     const std::vector<Point>& points, const GridConfig& grid,
                                     const WosConfig& wos, double grid_error_budget) {
  require_nondegenerate(domain, set);
  const MeasureField g = GridSystem(domain, grid).solve(set).field(points);
  const MeasureField w = wos_measure(domain, set, wos, points);
  std::optional<MeasureField> exact;
  if (detect_circle(domain)) exact = closed_form_measure(domain, set, points);

  CrossValidationReport report;
  report.grid_error_budget = grid_error_budget;
  for (std::size_t i = 0; i < points.size(); ++i) {
    CrossValidationRow row;
    row.z = points[i];
    row.grid = g.values[i];
    row.wos = w.values[i];
    row.wos_stderr = w.std_error[i];
    if (exact) row.closed_form = exact->values[i];
    row.discrepancy = std::abs(row.grid - row.wos);
    row.flagged = row.discrepancy > 3.0 * row.wos_stderr + grid_error_budget;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace crossenv
