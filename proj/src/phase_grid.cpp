#include "rte/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace rte {

double SpatialGrid::diameter() const { return std::hypot(extent.x, extent.y); }

std::string to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

AngularGrid build_angular(int ntheta) {
  if (ntheta < 2 || ntheta % 2 != 0) {
    throw std::invalid_argument("ntheta must be even and >= 2, got " + std::to_string(ntheta));
  }
  AngularGrid a;
  a.ntheta = ntheta;
  a.dtheta = 2.0 * std::numbers::pi / ntheta;
  a.angles.resize(ntheta);
  a.weights.assign(ntheta, 1.0 / ntheta);
  a.cosines.resize(ntheta);
  a.sines.resize(ntheta);
  for (int j = 0; j < ntheta; ++j) {
    a.angles[j] = (j + 0.5) * a.dtheta;
    a.cosines[j] = std::cos(a.angles[j]);
    a.sines[j] = std::sin(a.angles[j]);
    if (std::abs(a.cosines[j]) < kGrazingTolerance || std::abs(a.sines[j]) < kGrazingTolerance) {
      throw std::invalid_argument("ntheta=" + std::to_string(ntheta) +
                                  " places an ordinate on a grid axis (grazing)");
    }
  }
  return a;
}

PhaseSpaceGrid::PhaseSpaceGrid(SpatialGrid spatial, AngularGrid angular)
    : spatial_(std::move(spatial)), angular_(std::move(angular)) {
  const auto& s = spatial_;
  auto add_side = [&](Side side, int count) {
    side_offset_[static_cast<int>(side)] = static_cast<int>(facets_.size());
    for (int k = 0; k < count; ++k) {
      BoundaryFacet f;
      f.side = side;
      f.index = k;
      switch (side) {
        case Side::left:
          f.cell = s.cell(0, k);
          f.midpoint = {s.origin.x, s.origin.y + (k + 0.5) * s.dy};
          f.normal = {-1.0, 0.0};
          f.length = s.dy;
          break;
        case Side::right:
          f.cell = s.cell(s.nx - 1, k);
          f.midpoint = {s.origin.x + s.extent.x, s.origin.y + (k + 0.5) * s.dy};
          f.normal = {1.0, 0.0};
          f.length = s.dy;
          break;
        case Side::bottom:
          f.cell = s.cell(k, 0);
          f.midpoint = {s.origin.x + (k + 0.5) * s.dx, s.origin.y};
          f.normal = {0.0, -1.0};
          f.length = s.dx;
          break;
        case Side::top:
          f.cell = s.cell(k, s.ny - 1);
          f.midpoint = {s.origin.x + (k + 0.5) * s.dx, s.origin.y + s.extent.y};
          f.normal = {0.0, 1.0};
          f.length = s.dx;
          break;
      }
      facets_.push_back(f);
    }
  };
  add_side(Side::left, s.ny);
  add_side(Side::right, s.ny);
  add_side(Side::bottom, s.nx);
  add_side(Side::top, s.nx);

  const int nt = angular_.ntheta;
  inflow_of_.assign(facets_.size() * nt, -1);
  outflow_of_.assign(facets_.size() * nt, -1);
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
    for (int j = 0; j < nt; ++j) {
      const double nv = dot(facets_[f].normal, angular_.direction(j));
      if (std::abs(nv) < kGrazingTolerance) continue;
      PhaseBoundaryIndex idx{f, j, nv < 0 ? Flow::inflow : Flow::outflow,
                             std::abs(nv) * facets_[f].length * angular_.weights[j]};
      auto slot = static_cast<std::size_t>(f) * nt + j;
      if (idx.flow == Flow::inflow) {
        inflow_of_[slot] = static_cast<int>(inflow_.size());
        inflow_.push_back(idx);
      } else {
        outflow_of_[slot] = static_cast<int>(outflow_.size());
        outflow_.push_back(idx);
      }
    }
  }
}

int PhaseSpaceGrid::facet_id(Side side, int index) const {
  return side_offset_[static_cast<int>(side)] + index;
}

std::vector<double> PhaseSpaceGrid::inflow_weights() const {
  std::vector<double> w(inflow_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = inflow_[k].weight;
  return w;
}

std::vector<double> PhaseSpaceGrid::outflow_weights() const {
  std::vector<double> w(outflow_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = outflow_[k].weight;
  return w;
}

std::string PhaseSpaceGrid::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%dx%dx%d", spatial_.nx, spatial_.ny, angular_.ntheta);
  return buf;
}

PhaseSpaceGrid build_grid(int nx, int ny, int ntheta, Vec2 extent, Vec2 origin) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("nx and ny must be >= 2");
  }
  if (!(extent.x > 0.0) || !(extent.y > 0.0)) {
    throw std::invalid_argument("domain extent must be positive");
  }
  SpatialGrid s;
  s.nx = nx;
  s.ny = ny;
  s.dx = extent.x / nx;
  s.dy = extent.y / ny;
  s.origin = origin;
  s.extent = extent;
  return PhaseSpaceGrid(s, build_angular(ntheta));
}

double volume_quadrature(const PhaseSpaceGrid& grid, std::span<const double> f) {
  if (f.size() != static_cast<std::size_t>(grid.num_unknowns())) {
    throw std::invalid_argument("volume_quadrature: field size does not match grid");
  }
  const int nc = grid.num_cells();
  const double area = grid.spatial().cell_area();
  double total = 0.0;
  for (int j = 0; j < grid.num_ordinates(); ++j) {
    double partial = 0.0;
    for (int c = 0; c < nc; ++c) partial += f[static_cast<std::size_t>(j) * nc + c];
    total += partial * area * grid.angular().weights[j];
  }
  return total;
}

namespace {

struct Interval {
  double lo;
  double hi;
  int index;
};

// Projection of a facet onto the axis perpendicular to direction v.
Interval project(const BoundaryFacet& f, Vec2 v, int index) {
  const Vec2 perp{-v.y, v.x};
  const Vec2 tangent{-f.normal.y, f.normal.x};
  const double c = dot(f.midpoint, perp);
  const double half = 0.5 * f.length * std::abs(dot(tangent, perp));
  return {c - half, c + half, index};
}

}  // namespace

std::vector<ExitCouplingPiece> exit_coupling(const PhaseSpaceGrid& grid) {
  std::vector<ExitCouplingPiece> pieces;
  const auto& facets = grid.facets();
  for (int j = 0; j < grid.num_ordinates(); ++j) {
    const Vec2 v = grid.angular().direction(j);
    const double w = grid.angular().weights[j];
    std::vector<Interval> in, out;
    for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
      const auto& idx = grid.inflow()[k];
      if (idx.ordinate == j) in.push_back(project(facets[idx.facet], v, k));
    }
    for (int k = 0; k < static_cast<int>(grid.outflow().size()); ++k) {
      const auto& idx = grid.outflow()[k];
      if (idx.ordinate == j) out.push_back(project(facets[idx.facet], v, k));
    }
    auto by_lo = [](const Interval& a, const Interval& b) { return a.lo < b.lo; };
    std::sort(in.begin(), in.end(), by_lo);
    std::sort(out.begin(), out.end(), by_lo);
    std::size_t a = 0, b = 0;
    while (a < in.size() && b < out.size()) {
      const double lo = std::max(in[a].lo, out[b].lo);
      const double hi = std::min(in[a].hi, out[b].hi);
      // Rounding leaves slivers where interval endpoints coincide; skip them.
      if (hi - lo > 1e-12 * (in[a].hi - in[a].lo)) pieces.push_back({in[a].index, out[b].index, (hi - lo) * w});
      if (in[a].hi < out[b].hi) {
        ++a;
      } else {
        ++b;
      }
    }
  }
  return pieces;
}

}  // namespace rte
