#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "crossenv/geometry.hpp"

namespace crossenv {

using json = nlohmann::json;

inline constexpr const char* kToolkitVersion = "0.3.1";

json point_to_json(Point p);
Point point_from_json(const json& j);

/// {"outer": [[x,y],...], "holes": [[[x,y],...],...], "slits": [[[x,y],...],...]}
json domain_to_json(const PlanarDomain& domain);
PlanarDomain domain_from_json(const json& j);

/// Arcs are {"curve": "outer"|"hole:i"|"slit:i", "t0", "t1", "side"}. A set
/// is either a bare array of arcs or {"arcs": [...]}.
json arc_to_json(const BoundaryArc& arc);
BoundaryArc arc_from_json(const json& j);
json set_to_json(const BoundarySet& set);
BoundarySet set_from_json(const json& j);

/// Reads and parses a JSON file; config_error on I/O or syntax problems.
json load_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a over the compact dump of `j` (keys are sorted by nlohmann).
std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const json& j);
std::string hex64(std::uint64_t v);

}  // namespace crossenv
