#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossenv/polyline.hpp"

namespace crossenv {

/// Bounding-volume hierarchy over a fixed set of segments. Each segment
/// carries an opaque tag and an ordinal used for deterministic tie-breaking.
class SegmentIndex {
 public:
  struct Entry {
    Point a, b;
    std::uint32_t tag;      // caller-defined (curve number)
    std::uint32_t segment;  // segment number inside the tagged curve
  };

  struct Nearest {
    double distance = 0.0;
    std::size_t entry = 0;
    double s = 0.0;  // parameter along the entry segment
  };

  SegmentIndex() = default;
  explicit SegmentIndex(std::vector<Entry> entries);

  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Nearest segment to p. Ties within `tie_eps` are resolved towards the
  /// smaller (tag, segment, s) triple.
  Nearest nearest(Point p, double tie_eps = 1e-13) const;

  /// Distance only; cheaper because it skips tie handling.
  double distance(Point p) const;

  /// Indices of entries whose bounding boxes meet the box [lo, hi].
  void query_box(Point lo, Point hi, std::vector<std::size_t>& out) const;

 private:
  struct Node {
    double xmin, ymin, xmax, ymax;
    std::uint32_t left, right;  // children, or [first, first+count) when leaf
    std::uint32_t first, count;
  };
  std::uint32_t build(std::uint32_t first, std::uint32_t count);
  static double box_distance2(const Node& n, Point p);

  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
};

}  // namespace crossenv
