#include "crossenv/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crossenv/error.hpp"

namespace crossenv {

json point_to_json(Point p) { return json::array({p.real(), p.imag()}); }

Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(ErrorCode::config_error, "expected a point [x, y], got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

json curve_to_json(const Curve& c) {
  json out = json::array();
  for (const Point& p : c.vertices()) out.push_back(point_to_json(p));
  return out;
}

Curve curve_from_json(const json& j, bool closed) {
  if (!j.is_array()) fail(ErrorCode::config_error, "curve must be an array of points");
  std::vector<Point> v;
  v.reserve(j.size());
  for (const auto& p : j) v.push_back(point_from_json(p));
  return Curve(std::move(v), closed);
}

}  // namespace

json domain_to_json(const PlanarDomain& domain) {
  json out;
  out["outer"] = curve_to_json(domain.outer());
  out["holes"] = json::array();
  for (const Curve& h : domain.holes()) out["holes"].push_back(curve_to_json(h));
  out["slits"] = json::array();
  for (const Curve& s : domain.slits()) out["slits"].push_back(curve_to_json(s));
  return out;
}

PlanarDomain domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("outer")) fail(ErrorCode::config_error, "domain needs an \"outer\" curve");
  Curve outer = curve_from_json(j.at("outer"), true);
  std::vector<Curve> holes, slits;
  if (j.contains("holes")) {
    for (const auto& h : j.at("holes")) holes.push_back(curve_from_json(h, true));
  }
  if (j.contains("slits")) {
    for (const auto& s : j.at("slits")) slits.push_back(curve_from_json(s, false));
  }
  return PlanarDomain(std::move(outer), std::move(holes), std::move(slits));
}

json arc_to_json(const BoundaryArc& arc) {
  return json{{"curve", arc.curve.str()}, {"t0", arc.t0}, {"t1", arc.t1}, {"side", to_string(arc.side)}};
}

BoundaryArc arc_from_json(const json& j) {
  if (!j.is_object() || !j.contains("curve") || !j.contains("t0") || !j.contains("t1")) {
    fail(ErrorCode::config_error, "arc needs curve, t0 and t1: " + j.dump());
  }
  BoundaryArc arc;
  arc.curve = CurveId::parse(j.at("curve").get<std::string>());
  arc.t0 = j.at("t0").get<double>();
  arc.t1 = j.at("t1").get<double>();
  arc.side = j.contains("side") ? parse_side(j.at("side").get<std::string>()) : Side::both;
  return arc;
}

json set_to_json(const BoundarySet& set) {
  json arcs = json::array();
  for (const BoundaryArc& a : set.arcs) arcs.push_back(arc_to_json(a));
  return json{{"arcs", arcs}};
}

BoundarySet set_from_json(const json& j) {
  const json& arcs = j.is_object() && j.contains("arcs") ? j.at("arcs") : j;
  if (!arcs.is_array()) fail(ErrorCode::config_error, "boundary set must be an array of arcs");
  BoundarySet set;
  for (const auto& a : arcs) set.arcs.push_back(arc_from_json(a));
  return set;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config_error, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::config_error, "cannot write " + path.string());
  out << text;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const json& j) { return hex64(fnv1a(j.dump())); }

}  // namespace crossenv
