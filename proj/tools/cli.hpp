#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crossenv/geometry.hpp"

namespace crossenv::cli {

/// Exit statuses of the driver.
enum Exit : int { ok = 0, failure = 1, config = 2, numerical = 3, no_witness = 4 };

/// "0.3-0.2i", "1e-2+3i", "2i", "0.5"
Point parse_point(const std::string& text);
/// "64x48" -> {64, 48}
std::pair<int, int> parse_eval_grid(const std::string& text);

/// Runs the driver on argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crossenv::cli
