#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossenv/json_io.hpp"
#include "crossenv/measure.hpp"

namespace crossenv::acceptance {

struct Options {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string summary;  // measured quantities against their tolerances
  json details;

  /// "criterion <id> PASS|FAIL <name>: <summary> (<seconds>s)"
  std::string line() const;
  json to_json() const;
};

constexpr int kCriteria = 7;

/// Runs one criterion (1..7). Failures inside the computation are reported
/// as a failing result carrying the error message.
CriterionResult run(int id, const Options& options = {});
std::vector<CriterionResult> run_all(const Options& options = {});
json report_json(const std::vector<CriterionResult>& results);

}  // namespace crossenv::acceptance
