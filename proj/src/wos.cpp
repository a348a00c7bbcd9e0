#include <cmath>
#include <numbers>

#include "crossenv/error.hpp"
#include "crossenv/measure.hpp"
#include "crossenv/parallel.hpp"

namespace crossenv {

namespace {

constexpr long kBlock = 512;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream for one walk, keyed by (seed, point, sample, retry)
/// so the outcome of a walk does not depend on which thread ran it.
class WalkStream {
 public:
  WalkStream(std::uint64_t seed, std::uint64_t point, std::uint64_t sample, std::uint64_t retry)
      : key_(splitmix64(splitmix64(splitmix64(seed ^ 0x5eedULL) ^ point) ^ sample) ^ (retry * 0xa0761d6478bd642fULL)) {}

  double uniform() {
    const std::uint64_t bits = splitmix64(key_ + counter_++ * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace

WosSampler::WosSampler(const PlanarDomain& domain, const WosConfig& cfg) : domain_(&domain), cfg_(cfg) {
  if (cfg.samples < 1) fail(ErrorCode::config_error, "samples must be at least 1");
  if (cfg.max_steps < 1) fail(ErrorCode::config_error, "max_steps must be positive");
  if (cfg.epsilon_shell < 0.0) fail(ErrorCode::config_error, "epsilon_shell must be positive");
  if (cfg.retry_cap < 0) fail(ErrorCode::config_error, "retry_cap must be nonnegative");
  eps_ = cfg.epsilon_shell > 0.0 ? cfg.epsilon_shell : 1e-4 * domain.diameter();
}

ExitTable WosSampler::run(const std::vector<Point>& points) const {
  const PlanarDomain& domain = *domain_;
  for (const Point& z : points) {
    if (!domain.contains(z, 0.0)) fail(ErrorCode::invalid_input, "walk start point is not inside the domain");
  }
  ExitTable table;
  table.points = points;
  table.samples = cfg_.samples;
  table.exits.resize(points.size() * static_cast<std::size_t>(cfg_.samples));
  const long blocks_per_point = (cfg_.samples + kBlock - 1) / kBlock;
  const std::size_t items = points.size() * static_cast<std::size_t>(blocks_per_point);
  std::vector<long> retries(items, 0);
  const SegmentIndex& index = domain.index();

  parallel_for(items, cfg_.threads, [&](std::size_t item) {
    const std::size_t p = item / static_cast<std::size_t>(blocks_per_point);
    const long first = static_cast<long>(item % static_cast<std::size_t>(blocks_per_point)) * kBlock;
    const long last = std::min(cfg_.samples, first + kBlock);
    for (long s = first; s < last; ++s) {
      bool done = false;
      for (int retry = 0; retry <= cfg_.retry_cap && !done; ++retry) {
        WalkStream rng(cfg_.seed, p, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(retry));
        Point x = points[p];
        long steps = 0;
        for (;;) {
          const double d = index.distance(x);
          if (d <= eps_) {
            done = true;
            break;
          }
          if (++steps > cfg_.max_steps) break;
          const double angle = 2.0 * std::numbers::pi * rng.uniform();
          x += d * Point(std::cos(angle), std::sin(angle));
        }
        if (!done) {
          ++retries[item];
          continue;
        }
        const BoundaryLocation loc = nearest_boundary(domain, x);
        table.exits[p * static_cast<std::size_t>(cfg_.samples) + static_cast<std::size_t>(s)] =
            WalkExit{domain.tag_of(loc.curve), loc.side, loc.t};
      }
      if (!done) {
        fail(ErrorCode::step_budget_exceeded, "walk exceeded " + std::to_string(cfg_.max_steps) + " steps " +
                                                  std::to_string(cfg_.retry_cap + 1) + " times");
      }
    }
  }, 1);
  for (long r : retries) table.retried_walks += r;
  return table;
}

MeasureField evaluate_exits(const PlanarDomain& domain, const ExitTable& table, const BoundarySet& set) {
  require_nondegenerate(domain, set);
  const SetIndicator ind(domain, set);
  MeasureField field;
  field.engine = Engine::wos;
  field.points = table.points;
  const auto n = static_cast<double>(table.samples);
  for (std::size_t p = 0; p < table.points.size(); ++p) {
    long escaped = 0;
    for (long s = 0; s < table.samples; ++s) {
      const WalkExit& e = table.exits[p * static_cast<std::size_t>(table.samples) + static_cast<std::size_t>(s)];
      const CurveId id = domain.curve_of_tag(e.tag);
      if (!ind.contains(id, e.t, e.side == Side::minus ? Side::minus : Side::plus)) ++escaped;
    }
    const double v = static_cast<double>(escaped) / n;
    field.values.push_back(v);
    field.std_error.push_back(std::sqrt(v * (1.0 - v) / n));
  }
  return field;
}

MeasureField wos_measure(const PlanarDomain& domain, const BoundarySet& set, const WosConfig& cfg,
                         const std::vector<Point>& points) {
  require_nondegenerate(domain, set);
  return evaluate_exits(domain, WosSampler(domain, cfg).run(points), set);
}

}  // namespace crossenv
