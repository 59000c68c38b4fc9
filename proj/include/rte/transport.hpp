#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rte/media.hpp"
#include "rte/phase_grid.hpp"

namespace rte {

/// Values on the inflow or outflow index list of a PhaseSpaceGrid.
struct BoundaryFlux {
  Flow side = Flow::inflow;
  std::vector<double> values;
};

/// L1(Gamma, dxi) norm: sum |value| * weight.
double l1_norm(const PhaseSpaceGrid& grid, const BoundaryFlux& flux);

BoundaryFlux constant_inflow(const PhaseSpaceGrid& grid, double value);
/// Unit value at a single inflow index, zero elsewhere.
BoundaryFlux indicator_inflow(const PhaseSpaceGrid& grid, int inflow_index, double value = 1.0);
/// Inflow g(x, v) evaluated at facet midpoints.
BoundaryFlux inflow_from(const PhaseSpaceGrid& grid, const std::function<double(Vec2, Vec2)>& g);

struct IterationReport {
  int iterations = 0;
  double residual = 0.0;
};

/// f(cell, ordinate) stored ordinate-major, as PhaseSpaceGrid::num_unknowns().
struct KineticSolution {
  std::vector<double> values;
  IterationReport report;

  double at(const PhaseSpaceGrid& grid, int cell, int ordinate) const {
    return values[static_cast<std::size_t>(ordinate) * grid.num_cells() + cell];
  }
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(int iterations, double residual, int column = -1);

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }
  /// Albedo column that failed, or -1 for a standalone solve.
  int column() const { return column_; }

 private:
  int iterations_;
  double residual_;
  int column_;
};

struct SolveOptions {
  double tol = 1e-9;
  int max_iters = 50000;
  /// Start from the dxi-weighted mean of the inflow instead of zero; constant
  /// inflow into a conservative medium is then reproduced by the first sweep.
  bool start_from_inflow_mean = true;
};

/// One upwind sweep of v.grad f + sigma_Kn f = q with q isotropic per cell.
void sweep_into(const PhaseSpaceGrid& grid, std::span<const double> sigma_total,
                std::span<const double> source, std::span<const double> inflow, std::span<double> f);

KineticSolution sweep(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                      std::span<const double> source, const BoundaryFlux& inflow);

/// Source iteration for the scaled stationary transport equation. An optional
/// isotropic volume source (per cell) is added to the scattering source.
/// Throws NonConvergence when max_iters is exhausted.
KineticSolution solve_transport(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                const BoundaryFlux& inflow, const SolveOptions& options = {},
                                std::span<const double> volume_source = {});

std::vector<double> angular_average(const PhaseSpaceGrid& grid, std::span<const double> f);
inline std::vector<double> angular_average(const PhaseSpaceGrid& grid, const KineticSolution& f) {
  return angular_average(grid, f.values);
}

/// Upwind boundary-cell values at every outflow index.
BoundaryFlux outflow_trace(const PhaseSpaceGrid& grid, const KineticSolution& f);

/// Kn^-1 sum_j w_j (v_j . n) f(facet, v_j), using inflow data on incoming
/// ordinates and the trace on outgoing ones (outward current).
double averaged_albedo(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                       const KineticSolution& f, const BoundaryFlux& inflow, int facet);

}  // namespace rte
