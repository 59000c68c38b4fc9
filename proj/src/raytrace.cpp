#include "rte/raytrace.hpp"

#include <algorithm>
#include <cmath>

namespace rte {

double travel_time(const SpatialGrid& g, Vec2 x, Vec2 v, Direction dir) {
  if (dir == Direction::backward) v = {-v.x, -v.y};
  double t = INFINITY;
  if (v.x > 0) t = std::min(t, (g.origin.x + g.extent.x - x.x) / v.x);
  if (v.x < 0) t = std::min(t, (g.origin.x - x.x) / v.x);
  if (v.y > 0) t = std::min(t, (g.origin.y + g.extent.y - x.y) / v.y);
  if (v.y < 0) t = std::min(t, (g.origin.y - x.y) / v.y);
  return std::max(t, 0.0);
}

BoundaryExit exit_facet(const PhaseSpaceGrid& grid, Vec2 x, Vec2 v) {
  const auto& g = grid.spatial();
  const double tx = v.x > 0 ? (g.origin.x + g.extent.x - x.x) / v.x
                  : v.x < 0 ? (g.origin.x - x.x) / v.x
                            : INFINITY;
  const double ty = v.y > 0 ? (g.origin.y + g.extent.y - x.y) / v.y
                  : v.y < 0 ? (g.origin.y - x.y) / v.y
                            : INFINITY;
  BoundaryExit e;
  if (tx <= ty) {
    e.time = std::max(tx, 0.0);
    e.point = {x.x + e.time * v.x, x.y + e.time * v.y};
    const int k = std::clamp(static_cast<int>(std::floor((e.point.y - g.origin.y) / g.dy)), 0, g.ny - 1);
    e.facet = grid.facet_id(v.x > 0 ? Side::right : Side::left, k);
  } else {
    e.time = std::max(ty, 0.0);
    e.point = {x.x + e.time * v.x, x.y + e.time * v.y};
    const int k = std::clamp(static_cast<int>(std::floor((e.point.x - g.origin.x) / g.dx)), 0, g.nx - 1);
    e.facet = grid.facet_id(v.y > 0 ? Side::top : Side::bottom, k);
  }
  return e;
}

Ray trace_ray(const SpatialGrid& grid, Vec2 start, Vec2 direction) {
  Ray r;
  r.start = start;
  r.direction = direction;
  r.exit_time = travel_time(grid, start, direction);
  walk_cells(grid, start, direction,
             [&](int cell, double t0, double t1) { r.segments.push_back({cell, t0, t1}); });
  return r;
}

Ray inflow_ray(const PhaseSpaceGrid& grid, int inflow_index) {
  const auto& idx = grid.inflow()[inflow_index];
  return trace_ray(grid.spatial(), grid.facets()[idx.facet].midpoint,
                   grid.angular().direction(idx.ordinate));
}

double xray_transform(const SpatialGrid& grid, std::span<const double> cells, Vec2 x, Vec2 omega) {
  const double back = travel_time(grid, x, omega, Direction::backward);
  const Vec2 start{x.x - back * omega.x, x.y - back * omega.y};
  double sum = 0.0;
  walk_cells(grid, start, omega, [&](int cell, double t0, double t1) { sum += cells[cell] * (t1 - t0); });
  return sum;
}

double xray_transform(const SpatialGrid& grid, const ScalarFunction& f, Vec2 x, Vec2 omega,
                      double max_step) {
  const double back = travel_time(grid, x, omega, Direction::backward);
  const double length = back + travel_time(grid, x, omega);
  if (!(length > 0.0)) return 0.0;
  const Vec2 start{x.x - back * omega.x, x.y - back * omega.y};
  const int n = std::max(1, static_cast<int>(std::ceil(length / max_step)));
  const double h = length / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * h;
    sum += f({start.x + t * omega.x, start.y + t * omega.y});
  }
  return sum * h;
}

double xray_sup_norm(const PhaseSpaceGrid& grid, std::span<const double> cells) {
  double m = 0.0;
  for (const auto& idx : grid.inflow()) {
    const double x = xray_transform(grid.spatial(), cells, grid.facets()[idx.facet].midpoint,
                                    grid.angular().direction(idx.ordinate));
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace rte
