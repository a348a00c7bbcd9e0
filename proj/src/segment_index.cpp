#include "crossenv/segment_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace crossenv {

namespace {
constexpr std::uint32_t kLeafSize = 4;
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
}  // namespace

SegmentIndex::SegmentIndex(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  nodes_.reserve(2 * entries_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(entries_.size()));
}

std::uint32_t SegmentIndex::build(std::uint32_t first, std::uint32_t count) {
  Node node{};
  node.xmin = node.ymin = std::numeric_limits<double>::infinity();
  node.xmax = node.ymax = -std::numeric_limits<double>::infinity();
  for (std::uint32_t i = first; i < first + count; ++i) {
    const Entry& e = entries_[i];
    node.xmin = std::min({node.xmin, e.a.real(), e.b.real()});
    node.xmax = std::max({node.xmax, e.a.real(), e.b.real()});
    node.ymin = std::min({node.ymin, e.a.imag(), e.b.imag()});
    node.ymax = std::max({node.ymax, e.a.imag(), e.b.imag()});
  }
  node.left = node.right = kNone;
  node.first = first;
  node.count = count;
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);
  if (count <= kLeafSize) return id;

  const bool split_x = (node.xmax - node.xmin) >= (node.ymax - node.ymin);
  const auto mid = first + count / 2;
  auto key = [split_x](const Entry& e) {
    const Point c = 0.5 * (e.a + e.b);
    return split_x ? c.real() : c.imag();
  };
  std::nth_element(entries_.begin() + first, entries_.begin() + mid, entries_.begin() + first + count,
                   [&](const Entry& l, const Entry& r) { return key(l) < key(r); });
  const auto left = build(first, mid - first);
  const auto right = build(mid, first + count - mid);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double SegmentIndex::box_distance2(const Node& n, Point p) {
  const double dx = std::max({n.xmin - p.real(), 0.0, p.real() - n.xmax});
  const double dy = std::max({n.ymin - p.imag(), 0.0, p.imag() - n.ymax});
  return dx * dx + dy * dy;
}

SegmentIndex::Nearest SegmentIndex::nearest(Point p, double tie_eps) const {
  Nearest best;
  best.distance = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return best;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    const double bd = std::sqrt(box_distance2(n, p));
    if (bd > best.distance + tie_eps) continue;
    if (n.left == kNone) {
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        const Entry& e = entries_[i];
        const double s = closest_param(p, e.a, e.b);
        const double d = std::abs(p - (e.a + s * (e.b - e.a)));
        if (d < best.distance - tie_eps) {
          best = {d, i, s};
        } else if (d <= best.distance + tie_eps) {
          const Entry& cur = entries_[best.entry];
          if (std::tie(e.tag, e.segment, s) < std::tie(cur.tag, cur.segment, best.s)) {
            best = {std::min(d, best.distance), i, s};
          }
        }
      }
      continue;
    }
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    if (box_distance2(l, p) < box_distance2(r, p)) {
      stack[top++] = n.right;
      stack[top++] = n.left;
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return best;
}

double SegmentIndex::distance(Point p) const {
  double best2 = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return best2;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (box_distance2(n, p) >= best2) continue;
    if (n.left == kNone) {
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        const Entry& e = entries_[i];
        const double s = closest_param(p, e.a, e.b);
        best2 = std::min(best2, std::norm(p - (e.a + s * (e.b - e.a))));
      }
      continue;
    }
    const double dl = box_distance2(nodes_[n.left], p);
    const double dr = box_distance2(nodes_[n.right], p);
    if (dl < dr) {
      stack[top++] = n.right;
      stack[top++] = n.left;
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return std::sqrt(best2);
}

void SegmentIndex::query_box(Point lo, Point hi, std::vector<std::size_t>& out) const {
  if (nodes_.empty()) return;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.xmax < lo.real() || n.xmin > hi.real() || n.ymax < lo.imag() || n.ymin > hi.imag()) continue;
    if (n.left == kNone) {
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        const Entry& e = entries_[i];
        if (std::max(e.a.real(), e.b.real()) < lo.real() || std::min(e.a.real(), e.b.real()) > hi.real() ||
            std::max(e.a.imag(), e.b.imag()) < lo.imag() || std::min(e.a.imag(), e.b.imag()) > hi.imag())
          continue;
        out.push_back(i);
      }
      continue;
    }
    stack[top++] = n.left;
    stack[top++] = n.right;
  }
}

}  // namespace crossenv
