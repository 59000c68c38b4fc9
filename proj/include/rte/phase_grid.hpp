#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace rte {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Uniform cell-centered grid on an axis-aligned rectangle.
struct SpatialGrid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  Vec2 origin;
  Vec2 extent;

  int num_cells() const { return nx * ny; }
  int cell(int i, int j) const { return j * nx + i; }
  int cell_i(int c) const { return c % nx; }
  int cell_j(int c) const { return c / nx; }
  Vec2 center(int c) const {
    return {origin.x + (cell_i(c) + 0.5) * dx, origin.y + (cell_j(c) + 0.5) * dy};
  }
  double cell_area() const { return dx * dy; }
  double diameter() const;
};

/// Equally spaced midpoint ordinates on the unit circle with normalized weights.
struct AngularGrid {
  int ntheta = 0;
  double dtheta = 0.0;
  std::vector<double> angles;
  std::vector<double> weights;
  std::vector<double> cosines;
  std::vector<double> sines;

  Vec2 direction(int j) const { return {cosines[j], sines[j]}; }
  int size() const { return ntheta; }
};

enum class Side { left, right, bottom, top };

std::string to_string(Side s);

struct BoundaryFacet {
  Side side = Side::left;
  int index = 0;  // cell index along the side
  int cell = 0;   // adjacent interior cell
  Vec2 midpoint;
  Vec2 normal;  // unit outward normal
  double length = 0.0;
};

enum class Flow { inflow, outflow };

/// One (facet, ordinate) pair of Gamma_- or Gamma_+ with its measure |n.v| h w.
struct PhaseBoundaryIndex {
  int facet = 0;
  int ordinate = 0;
  Flow flow = Flow::inflow;
  double weight = 0.0;
};

class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(SpatialGrid spatial, AngularGrid angular);

  const SpatialGrid& spatial() const { return spatial_; }
  const AngularGrid& angular() const { return angular_; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }
  const std::vector<PhaseBoundaryIndex>& inflow() const { return inflow_; }
  const std::vector<PhaseBoundaryIndex>& outflow() const { return outflow_; }

  int num_cells() const { return spatial_.num_cells(); }
  int num_ordinates() const { return angular_.ntheta; }
  /// Number of kinetic unknowns; storage is ordinate-major: j * num_cells() + c.
  int num_unknowns() const { return num_cells() * num_ordinates(); }

  /// Position in inflow()/outflow() of (facet, ordinate), or -1.
  int inflow_index(int facet, int ordinate) const {
    return inflow_of_[static_cast<std::size_t>(facet) * angular_.ntheta + ordinate];
  }
  int outflow_index(int facet, int ordinate) const {
    return outflow_of_[static_cast<std::size_t>(facet) * angular_.ntheta + ordinate];
  }
  int facet_id(Side side, int index) const;

  std::vector<double> inflow_weights() const;
  std::vector<double> outflow_weights() const;

  std::string describe() const;

 private:
  SpatialGrid spatial_;
  AngularGrid angular_;
  std::vector<BoundaryFacet> facets_;
  std::vector<PhaseBoundaryIndex> inflow_;
  std::vector<PhaseBoundaryIndex> outflow_;
  std::vector<int> inflow_of_;
  std::vector<int> outflow_of_;
  std::array<int, 4> side_offset_{};
};

/// Ordinates closer than this to an axis are rejected as grazing.
inline constexpr double kGrazingTolerance = 1e-12;

AngularGrid build_angular(int ntheta);

/// Builds the phase-space grid on [origin, origin + extent].
/// Throws std::invalid_argument on counts < 2, odd ntheta or grazing ordinates.
PhaseSpaceGrid build_grid(int nx, int ny, int ntheta, Vec2 extent, Vec2 origin = {});

/// Sum of f(cell, ordinate) dx dy w_j with f stored ordinate-major.
double volume_quadrature(const PhaseSpaceGrid& grid, std::span<const double> f);

/// Piece of the measure-preserving pairing between Gamma_- and Gamma_+ for a
/// single ordinate: the flux tube of an inflow facet is split where the
/// outflow facet tubes begin, so the pieces form a bijection of sub-tubes.
struct ExitCouplingPiece {
  int in_index = 0;
  int out_index = 0;
  double weight = 0.0;
};

/// Discrete backward-exit map for every ordinate. Summing pieces over a fixed
/// in_index reproduces its dxi weight; likewise for out_index.
std::vector<ExitCouplingPiece> exit_coupling(const PhaseSpaceGrid& grid);

}  // namespace rte
