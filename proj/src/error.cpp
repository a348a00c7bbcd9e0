#include "crossenv/error.hpp"

namespace crossenv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_curve: return "InvalidCurve";
    case ErrorCode::invalid_domain: return "InvalidDomain";
    case ErrorCode::invalid_set: return "InvalidSet";
    case ErrorCode::degenerate_set: return "DegenerateSet";
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::ambiguous_point: return "AmbiguousPoint";
    case ErrorCode::point_on_boundary: return "PointOnBoundary";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::grid_too_coarse: return "GridTooCoarse";
    case ErrorCode::step_budget_exceeded: return "StepBudgetExceeded";
    case ErrorCode::not_nested: return "NotNested";
    case ErrorCode::no_clearance: return "NoClearance";
    case ErrorCode::type_mismatch: return "TypeMismatch";
    case ErrorCode::not_strongly_pseudoconvex: return "NotStronglyPseudoconvex";
    case ErrorCode::no_witness: return "NoWitness";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace crossenv
