#pragma once

// Independent geometry references for the test suites. None of these call
// into the ray-walking code they are used to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "rte/phase_grid.hpp"

namespace rte::oracle {

/// Distance from p (inside the closed box) along unit v to the box boundary:
/// the nearer of the two walls the ray is heading for.
inline double chord_to_boundary(Vec2 p, Vec2 v, Vec2 lo, Vec2 hi) {
  const double tx = v.x > 0 ? (hi.x - p.x) / v.x : v.x < 0 ? (lo.x - p.x) / v.x : INFINITY;
  const double ty = v.y > 0 ? (hi.y - p.y) / v.y : v.y < 0 ? (lo.y - p.y) / v.y : INFINITY;
  return std::max(0.0, std::min(tx, ty));
}

/// Length of the segment p + t v, t in [0, tmax], inside the axis-aligned box
/// [lo, hi] (slab clipping).
inline double clipped_length(Vec2 p, Vec2 v, double tmax, Vec2 lo, Vec2 hi) {
  double t0 = 0.0, t1 = tmax;
  auto slab = [&](double pc, double vc, double a, double b) {
    if (vc == 0.0) return pc >= a && pc <= b;
    double ta = (a - pc) / vc, tb = (b - pc) / vc;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 < t1;
  };
  if (!slab(p.x, v.x, lo.x, hi.x)) return 0.0;
  if (!slab(p.y, v.y, lo.y, hi.y)) return 0.0;
  return std::max(0.0, t1 - t0);
}

/// Line integral of a cellwise-constant field by clipping the chord against
/// every cell (brute force over the whole grid).
inline double brute_force_xray(const SpatialGrid& g, std::span<const double> cells, Vec2 start, Vec2 v) {
  const double len = chord_to_boundary(start, v, g.origin, {g.origin.x + g.extent.x, g.origin.y + g.extent.y});
  double sum = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    const Vec2 lo{g.origin.x + g.cell_i(c) * g.dx, g.origin.y + g.cell_j(c) * g.dy};
    const Vec2 hi{lo.x + g.dx, lo.y + g.dy};
    sum += cells[c] * clipped_length(start, v, len, lo, hi);
  }
  return sum;
}

inline std::vector<double> random_vector(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace rte::oracle
