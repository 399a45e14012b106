#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "supbridge/crookedness.hpp"
#include "supbridge/curves.hpp"
#include "supbridge/errors.hpp"
#include "supbridge/geometry.hpp"

namespace supbridge {

/// Worker count: SUPBRIDGE_THREADS if set and positive, else the hardware
/// concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("SUPBRIDGE_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on thread_count() workers. Exceptions are
/// rethrown on the calling thread (the first one by index wins).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_at(workers, n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (i < error_at[w]) {
            errors[w] = std::current_exception();
            error_at[w] = i;
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t best = n;
  std::exception_ptr first;
  for (unsigned w = 0; w < workers; ++w) {
    if (errors[w] && error_at[w] < best) {
      best = error_at[w];
      first = errors[w];
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Deterministic low-discrepancy directions on the open upper hemisphere
/// (area-uniform R2 sequence). The first M points of a larger grid are the
/// grid of size M, so grids are nested.
struct SphereGrid {
  std::size_t size = 20000;
  int rounds = 20;             // hill-climbing rounds
  double shrink = 0.5;         // cap radius factor per round
  double seed_fraction = 0.1;  // top fraction of the grid used as seeds
  std::size_t max_seeds = 256;
  std::function<bool(const Direction&)> exclude;  // optional exclusion tube

  explicit SphereGrid(std::size_t m = 20000) : size(m) {}

  static Direction point(std::size_t i) {
    // Plastic-number R2 sequence.
    constexpr double g = 1.32471795724474602596;
    constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g);
    const double x = static_cast<double>(i) + 1.0;
    const double u = std::fmod(0.5 + a1 * x, 1.0);
    const double w = std::fmod(0.5 + a2 * x, 1.0);
    const double z = 1.0 - u;  // in (0, 1]
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Direction::normalized(r * std::cos(kTwoPi * w), r * std::sin(kTwoPi * w), z);
  }

  std::vector<Direction> directions() const {
    if (size == 0) throw ParameterError("sphere grid is empty");
    std::vector<Direction> out;
    out.reserve(size);
    for (std::size_t i = 0; out.size() < size; ++i) {
      Direction d = point(i);
      if (d.v3() <= 0.0) continue;
      if (exclude && exclude(d)) {
        if (i > 64 * size) throw ParameterError("exclusion removes almost every direction");
        continue;
      }
      out.push_back(d);
    }
    return out;
  }

  /// Typical spacing between neighbouring grid points, in radians.
  double spacing() const { return std::sqrt(kTwoPi / static_cast<double>(std::max<std::size_t>(1, size))); }
};

enum class ScanMode { Max, Min };

struct ScanResult {
  ScanMode mode = ScanMode::Max;
  int extremal = 0;
  Direction witness;
  std::map<int, std::size_t> histogram;  // grid directions only
  std::size_t degenerate = 0;
  std::size_t evaluated = 0;
  /// Extremum including degenerate directions.
  int extremal_any = 0;
  /// A degenerate direction was more extreme than every non-degenerate one.
  bool unstable = false;
  /// Up to 16 directions attaining `extremal`, grid ones first.
  std::vector<Direction> witnesses;
};

namespace detail {

inline bool better(ScanMode m, int a, int b) { return m == ScanMode::Max ? a > b : a < b; }

/// Direction at angular distance r from v, azimuth phi about v.
inline Direction cap_point(const Direction& v, double r, double phi) {
  const Vec3 n = v.vec();
  const Vec3 helper = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = n.cross(helper).normalized();
  const Vec3 e2 = n.cross(e1);
  return Direction::normalized(std::cos(r) * n +
                               std::sin(r) * (std::cos(phi) * e1 + std::sin(phi) * e2));
}

}  // namespace detail

template <DirectionCounter C>
ScanResult scan(const C& counter, const SphereGrid& grid, ScanMode mode) {
  const std::vector<Direction> dirs = grid.directions();
  std::vector<CountResult> res(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) { res[i] = counter.count(dirs[i]); });

  ScanResult out;
  out.mode = mode;
  out.evaluated = dirs.size();
  bool have = false, have_any = false;
  int any_best = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    ++out.histogram[res[i].count];
    if (!have_any || detail::better(mode, res[i].count, any_best)) any_best = res[i].count;
    have_any = true;
    if (res[i].degenerate) {
      ++out.degenerate;
      continue;
    }
    if (!have || detail::better(mode, res[i].count, out.extremal)) {
      out.extremal = res[i].count;
      out.witness = dirs[i];
      have = true;
    }
  }
  if (!have) throw DegenerateError("every scanned direction is degenerate");

  // Seeds: grid directions (in grid order) within one of the extremum.
  std::vector<std::size_t> seeds;
  const auto limit = std::min<std::size_t>(
      grid.max_seeds, std::max<std::size_t>(1, static_cast<std::size_t>(grid.seed_fraction * dirs.size())));
  const int level = mode == ScanMode::Max ? out.extremal - 1 : out.extremal + 1;
  for (std::size_t i = 0; i < dirs.size() && seeds.size() < limit; ++i) {
    if (res[i].degenerate) continue;
    if (!detail::better(mode, level, res[i].count)) seeds.push_back(i);
  }

  struct Climb {
    int count;
    Direction dir;
    std::size_t evals = 0;
    std::size_t degenerate = 0;
    int any = 0;
  };
  std::vector<Climb> climbs(seeds.size());
  const double r0 = 2.0 * grid.spacing();
  parallel_for(seeds.size(), [&](std::size_t s) {
    Climb c{res[seeds[s]].count, dirs[seeds[s]]};
    c.any = c.count;
    double r = r0;
    for (int round = 0; round < grid.rounds; ++round) {
      int best = c.count;
      Direction best_dir = c.dir;
      for (int k = 0; k < 8; ++k) {
        const double phi = kTwoPi * (k + 0.5 * (round % 2)) / 8.0;
        const Direction d = detail::cap_point(c.dir, r, phi);
        const CountResult cr = counter.count(d);
        ++c.evals;
        if (detail::better(mode, cr.count, c.any)) c.any = cr.count;
        if (cr.degenerate) {
          ++c.degenerate;
          continue;
        }
        if (detail::better(mode, cr.count, best)) {
          best = cr.count;
          best_dir = d;
        }
      }
      c.count = best;
      c.dir = best_dir;
      r *= grid.shrink;
    }
    climbs[s] = c;
  });
  for (const auto& c : climbs) {
    out.evaluated += c.evals;
    out.degenerate += c.degenerate;
    if (detail::better(mode, c.any, any_best)) any_best = c.any;
    if (detail::better(mode, c.count, out.extremal)) {
      out.extremal = c.count;
      out.witness = c.dir;
    }
  }
  for (std::size_t i = 0; i < dirs.size() && out.witnesses.size() < 16; ++i) {
    if (!res[i].degenerate && res[i].count == out.extremal) out.witnesses.push_back(dirs[i]);
  }
  for (std::size_t s = 0; s < climbs.size() && out.witnesses.size() < 16; ++s) {
    if (climbs[s].count == out.extremal) out.witnesses.push_back(climbs[s].dir);
  }
  out.unstable = detail::better(mode, any_best, out.extremal);
  out.extremal_any = out.unstable ? any_best : out.extremal;
  return out;
}

template <DirectionCounter C>
ScanResult scan_max(const C& counter, const SphereGrid& grid) {
  return scan(counter, grid, ScanMode::Max);
}

template <DirectionCounter C>
ScanResult scan_min(const C& counter, const SphereGrid& grid) {
  return scan(counter, grid, ScanMode::Min);
}

inline ScanResult scan_max(const PolyKnot& k, const SphereGrid& g) { return scan_max(PolyCounter(k), g); }
inline ScanResult scan_min(const PolyKnot& k, const SphereGrid& g) { return scan_min(PolyCounter(k), g); }
inline ScanResult scan_max(const PiecewiseKnot& k, const SphereGrid& g) { return scan_max(PathCounter(k), g); }
inline ScanResult scan_min(const PiecewiseKnot& k, const SphereGrid& g) { return scan_min(PathCounter(k), g); }
inline ScanResult scan_max(const SmoothCurve& k, const SphereGrid& g) { return scan_max(PathCounter(k), g); }
inline ScanResult scan_min(const SmoothCurve& k, const SphereGrid& g) { return scan_min(PathCounter(k), g); }

struct CertifyReport {
  int bound = 0;
  bool passed = false;
  int observed_max = 0;
  std::vector<Direction> violations;  // at most 16
  std::size_t evaluated = 0;
  std::size_t degenerate = 0;
};

/// Checks crook(K, v) <= bound over the grid and the maximizing refinement;
/// degenerate directions count against the bound too.
template <DirectionCounter C>
CertifyReport certify_bound(const C& counter, int bound, const SphereGrid& grid) {
  const ScanResult r = scan_max(counter, grid);
  CertifyReport rep;
  rep.bound = bound;
  rep.observed_max = std::max(r.extremal, r.extremal_any);
  rep.evaluated = r.evaluated;
  rep.degenerate = r.degenerate;
  rep.passed = rep.observed_max <= bound;
  if (!rep.passed) rep.violations = r.witnesses;
  return rep;
}

inline CertifyReport certify_bound(const PolyKnot& k, int bound, const SphereGrid& g) {
  return certify_bound(PolyCounter(k), bound, g);
}
inline CertifyReport certify_bound(const PiecewiseKnot& k, int bound, const SphereGrid& g) {
  return certify_bound(PathCounter(k), bound, g);
}
inline CertifyReport certify_bound(const SmoothCurve& k, int bound, const SphereGrid& g) {
  return certify_bound(PathCounter(k), bound, g);
}

}  // namespace supbridge
