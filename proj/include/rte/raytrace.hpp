#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rte/media.hpp"
#include "rte/phase_grid.hpp"

namespace rte {

enum class Direction { forward, backward };

/// Distance from x (in the closed box) to the boundary along +v or -v.
double travel_time(const SpatialGrid& grid, Vec2 x, Vec2 v, Direction dir = Direction::forward);

struct BoundaryExit {
  double time = 0.0;
  int facet = 0;
  Vec2 point;
};

/// Facet where the ray x + t v leaves the box.
BoundaryExit exit_facet(const PhaseSpaceGrid& grid, Vec2 x, Vec2 v);

struct Segment {
  int cell = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double length() const { return t1 - t0; }
};

/// Ray from a point of the closed box to its forward exit, with the cells it crosses.
struct Ray {
  Vec2 start;
  Vec2 direction;
  double exit_time = 0.0;
  std::vector<Segment> segments;

  Vec2 end() const { return {start.x + exit_time * direction.x, start.y + exit_time * direction.y}; }
};

namespace detail {

// Cell index along one axis; points on a grid line are assigned to the cell
// the ray is about to enter.
inline int axis_cell(double coord, double origin, double h, int n, double dir) {
  const double s = (coord - origin) / h;
  const double k = std::round(s);
  int i;
  if (std::abs(s - k) < 1e-12 * std::max(1.0, std::abs(s))) {
    i = static_cast<int>(k) - (dir > 0 ? 0 : 1);
  } else {
    i = static_cast<int>(std::floor(s));
  }
  return std::clamp(i, 0, n - 1);
}

}  // namespace detail

/// Walks the cells crossed by x + t v, t in [0, travel_time], calling
/// visit(cell, t0, t1) in order. Crossings are exact parametric box/cell hits.
template <class Visitor>
void walk_cells(const SpatialGrid& g, Vec2 x, Vec2 v, Visitor&& visit) {
  const double tau = travel_time(g, x, v);
  if (!(tau > 0.0)) return;
  int ix = detail::axis_cell(x.x, g.origin.x, g.dx, g.nx, v.x);
  int iy = detail::axis_cell(x.y, g.origin.y, g.dy, g.ny, v.y);
  const int sx = v.x > 0 ? 1 : -1;
  const int sy = v.y > 0 ? 1 : -1;
  const double dtx = v.x != 0.0 ? g.dx / std::abs(v.x) : INFINITY;
  const double dty = v.y != 0.0 ? g.dy / std::abs(v.y) : INFINITY;
  double tnx = v.x != 0.0 ? (g.origin.x + (ix + (sx > 0 ? 1 : 0)) * g.dx - x.x) / v.x : INFINITY;
  double tny = v.y != 0.0 ? (g.origin.y + (iy + (sy > 0 ? 1 : 0)) * g.dy - x.y) / v.y : INFINITY;
  // Crossings closer than this count as one corner crossing.
  const double tie = 1e-12 * std::min(g.dx, g.dy);
  double t = 0.0;
  while (t < tau) {
    const double tnext = std::min({tnx, tny, tau});
    if (tnext > t) visit(g.cell(ix, iy), t, tnext);
    t = tnext;
    if (t >= tau) break;
    const bool step_x = tnx <= tny + tie;
    const bool step_y = tny <= tnx + tie;
    if (step_x) {
      ix += sx;
      tnx += dtx;
    }
    if (step_y) {
      iy += sy;
      tny += dty;
    }
    if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny) break;
  }
}

Ray trace_ray(const SpatialGrid& grid, Vec2 start, Vec2 direction);

/// Ray entering through inflow index k (facet midpoint, ordinate direction).
Ray inflow_ray(const PhaseSpaceGrid& grid, int inflow_index);

/// Line integral of a cellwise-constant field over the full chord through x
/// along omega: the sum of cell value times segment length.
double xray_transform(const SpatialGrid& grid, std::span<const double> cells, Vec2 x, Vec2 omega);

/// Composite midpoint rule over the chord through x with step <= max_step.
double xray_transform(const SpatialGrid& grid, const ScalarFunction& f, Vec2 x, Vec2 omega,
                      double max_step);

/// max |X f| over all discrete inflow rays.
double xray_sup_norm(const PhaseSpaceGrid& grid, std::span<const double> cells);

}  // namespace rte
