#include "crossenv/measure.hpp"

#include <cstdio>

#include "crossenv/error.hpp"

namespace crossenv {

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::closed_form: return "closed_form";
    case Engine::grid: return "grid";
    case Engine::wos: return "wos";
  }
  return "?";
}

Engine parse_engine(const std::string& text) {
  if (text == "closed_form" || text == "closed-form") return Engine::closed_form;
  if (text == "grid") return Engine::grid;
  if (text == "wos") return Engine::wos;
  fail(ErrorCode::config_error, "unknown engine '" + text + "'");
}

std::string field_to_csv(const MeasureField& field, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "x,y,value,stderr,engine\n";
  const std::string engine = to_string(field.engine);
  char buf[160];
  for (std::size_t i = 0; i < field.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", field.points[i].real(), field.points[i].imag(),
                  field.values[i], field.std_error[i]);
    out += buf;
    out += engine;
    out += '\n';
  }
  return out;
}

void require_nondegenerate(const PlanarDomain& domain, const BoundarySet& set) {
  validate(domain, set);
  if (set.empty() || !(arc_length(set) > 0.0)) {
    fail(ErrorCode::degenerate_set, "boundary set has zero length");
  }
}

}  // namespace crossenv
