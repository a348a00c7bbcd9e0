#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crossenv {

enum class ErrorCode {
  invalid_curve,
  invalid_domain,
  invalid_set,
  degenerate_set,
  invalid_input,
  ambiguous_point,
  point_on_boundary,
  no_convergence,
  grid_too_coarse,
  step_budget_exceeded,
  not_nested,
  no_clearance,
  type_mismatch,
  not_strongly_pseudoconvex,
  no_witness,
  config_error,
};

std::string_view to_string(ErrorCode code);

/// All toolkit failures are reported through this exception type; the code
/// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace crossenv
