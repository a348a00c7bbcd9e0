#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crossenv/polyline.hpp"
#include "crossenv/segment_index.hpp"

namespace crossenv {

enum class CurveKind { outer = 0, hole = 1, slit = 2 };

/// Reference to one boundary curve of a PlanarDomain. Ordering is
/// (kind, index): outer < hole:0 < hole:1 < ... < slit:0 < ...
struct CurveId {
  CurveKind kind = CurveKind::outer;
  std::size_t index = 0;

  auto operator<=>(const CurveId&) const = default;
  std::string str() const;
  static CurveId parse(const std::string& text);
};

/// Face of a boundary arc. Slits have two addressable faces: `plus` lies to
/// the left of the slit's vertex order, `minus` to the right. Arcs on
/// outer/hole curves always use `both`.
enum class Side { both, plus, minus };

std::string to_string(Side side);
Side parse_side(const std::string& text);

enum class PointType { type1, type2, not_boundary };

/// Planar open set bounded by a positively oriented outer polygon, with
/// polygonal holes and two-sided slits removed.
class PlanarDomain {
 public:
  PlanarDomain() = default;
  /// Validates the structural invariants and throws invalid_domain on
  /// failure: simple curves, CCW outer, holes and slits pairwise disjoint and
  /// strictly inside the outer curve.
  PlanarDomain(Curve outer, std::vector<Curve> holes = {}, std::vector<Curve> slits = {});

  const Curve& outer() const { return outer_; }
  const std::vector<Curve>& holes() const { return holes_; }
  const std::vector<Curve>& slits() const { return slits_; }

  /// All curves in canonical CurveId order.
  std::vector<CurveId> curve_ids() const;
  const Curve& curve(CurveId id) const;
  bool has_curve(CurveId id) const;

  /// True when the domain lies to the left of the curve's orientation
  /// (meaningless for slits, where it lies on both sides).
  bool interior_on_left(CurveId id) const;

  /// Strict interior test: inside the outer curve, outside every hole, and
  /// farther than `eps` from the boundary (slits included).
  bool contains(Point z, double eps = 1e-12) const;

  /// Boundary distance from the segment index.
  double boundary_distance(Point z) const { return index_->distance(z); }

  double area() const;
  double diameter() const;
  Point bbox_min() const { return bbox_min_; }
  Point bbox_max() const { return bbox_max_; }

  const SegmentIndex& index() const { return *index_; }
  /// CurveId for a SegmentIndex tag.
  CurveId curve_of_tag(std::uint32_t tag) const;
  std::uint32_t tag_of(CurveId id) const;

  /// Minimum distance between a slit and any other boundary curve; +inf
  /// without slits.
  double min_slit_clearance() const;

 private:
  Curve outer_;
  std::vector<Curve> holes_;
  std::vector<Curve> slits_;
  std::vector<bool> hole_ccw_;
  Point bbox_min_{}, bbox_max_{};
  std::shared_ptr<const SegmentIndex> index_;
};

struct BoundaryArc {
  CurveId curve;
  double t0 = 0.0;
  double t1 = 0.0;
  Side side = Side::both;

  double length() const { return t1 - t0; }
};

/// A finite union of boundary arcs.
struct BoundarySet {
  std::vector<BoundaryArc> arcs;

  bool empty() const { return arcs.empty(); }
};

/// Checks every arc against the domain: the curve exists, the interval is
/// nonempty and lies within the curve (closed curves may wrap once), faces
/// are only given for slits, and arcs do not overlap after expanding `both`
/// on slits into its two faces. Throws invalid_set.
void validate(const PlanarDomain& domain, const BoundarySet& set);

/// Length measure of the set. Slit faces are distinct boundary pieces, so
/// an arc with side `both` on a slit counts twice.
double arc_length(const BoundarySet& set);

/// Interval membership lookup for a validated set; answers whether a
/// boundary location (curve, parameter, face) belongs to the set.
class SetIndicator {
 public:
  SetIndicator(const PlanarDomain& domain, const BoundarySet& set);

  /// Face must be plus or minus on slits; it is ignored on other curves.
  bool contains(CurveId curve, double t, Side face) const;

  /// Merged parameter intervals for one curve face (unwrapped into
  /// [0, length]).
  const std::vector<std::pair<double, double>>& intervals(CurveId curve, Side face) const;

  /// Fraction of the parameter window [t - width/2, t + width/2] that lies
  /// in the set (periodic on closed curves, clipped on open ones).
  double coverage(CurveId curve, double t, double width, Side face) const;

 private:
  std::size_t slot(CurveId curve, Side face) const;
  std::vector<CurveId> ids_;
  std::vector<std::vector<std::pair<double, double>>> intervals_;  // 2 slots per curve
  std::vector<double> lengths_;
  std::vector<bool> closed_;
};

/// Merges possibly overlapping intervals into a sorted disjoint list.
std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> v, double join_gap = 0.0);

PointType classify_point(const PlanarDomain& domain, Point zeta, double tol);

struct BoundaryLocation {
  double distance = 0.0;
  CurveId curve;
  double t = 0.0;
  Side side = Side::both;  // plus/minus on slits, both elsewhere (n/a)
  Point foot;
};

/// Euclidean distance to the boundary together with the foot point. Ties
/// resolve to the smallest CurveId, then the smallest parameter.
BoundaryLocation nearest_boundary(const PlanarDomain& domain, Point z);

/// Points of A lying on a type-2 open curve C with C \ A of zero length.
/// A slit point belongs to A as a point of the boundary when both of its
/// faces are covered. Covered pieces of length <= tol_len are treated as
/// null and dropped. The result uses side `both` on slit curves.
BoundarySet find_extendible_points(const PlanarDomain& domain, const BoundarySet& set, double tol_len);

/// Polyline carrying the arc's point set.
std::vector<Point> arc_polyline(const PlanarDomain& domain, const BoundaryArc& arc);

/// Open set A_k of the boundary obtained by widening every arc by `pad` in
/// arc length on both ends (clamped on open curves, saturating to the full
/// curve on closed ones), merged per face.
BoundarySet widen(const PlanarDomain& domain, const BoundarySet& set, double pad);

/// True when every point (and face) of `inner` is in `outer`, up to `eps`
/// in parameter.
bool set_contains(const PlanarDomain& domain, const BoundarySet& outer, const BoundarySet& inner, double eps = 1e-12);

/// Whole boundary of the domain as a set (both faces of every slit).
BoundarySet whole_boundary(const PlanarDomain& domain);

/// Circle data when the outer curve is a regular polygon inscribed in a
/// circle and the domain has no holes or slits.
struct CircleInfo {
  Point center;
  double radius;
  double phase;  // angle of vertex 0
  std::size_t vertices;
};
std::optional<CircleInfo> detect_circle(const PlanarDomain& domain);

/// Angle on the circle for an outer-curve parameter, and its inverse, for
/// domains with detect_circle() data.
double circle_angle(const CircleInfo& info, const Curve& outer, double t);
double circle_param(const CircleInfo& info, const Curve& outer, double angle);

}  // namespace crossenv
