#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rte/media.hpp"
#include "rte/phase_grid.hpp"
#include "rte/transport.hpp"

namespace rte {

/// Second angular moment sum_j w_j cos^2(theta_j); 1/2 for midpoint ordinates.
double diffusion_coefficient(const AngularGrid& angular);

struct DiffusionSolution {
  std::vector<double> rho;       // per cell
  std::vector<double> boundary;  // Dirichlet data per facet
  double coefficient = 0.0;
  double residual = 0.0;  // max-norm residual of the discrete system
  int iterations = 0;
};

/// Solves C div(sigma_s^-1 grad rho) - sigma_a rho + source = 0 with rho = g on
/// the boundary. Five-point stencil, harmonic-mean face coefficients, Dirichlet
/// ghost cells. Throws std::invalid_argument if sigma_s <= 0 anywhere.
DiffusionSolution solve_diffusion(const PhaseSpaceGrid& grid, const MediumField& medium,
                                  std::span<const double> facet_values, double coefficient,
                                  std::span<const double> source = {}, double tol = 1e-10);

/// Outward normal derivative at each facet from one-sided second-order
/// differences (boundary value and the first two cells inward).
std::vector<double> normal_derivative(const PhaseSpaceGrid& grid, const DiffusionSolution& sol);

/// Dirichlet-to-Neumann map in outward-current convention: -C sigma_s^-1 d_n rho.
std::vector<double> dirichlet_to_neumann(const PhaseSpaceGrid& grid, const MediumField& medium,
                                         const DiffusionSolution& sol);

using BoundaryData = std::function<double(Vec2)>;

std::vector<double> facet_values(const PhaseSpaceGrid& grid, const BoundaryData& g);

struct LimitRow {
  double kn = 0.0;
  double err_linf = 0.0;  // max_cell |<f_Kn> - rho|
  double dtn_disc = 0.0;  // max_facet |averaged albedo - DtN|
  int iterations = 0;
};

/// Kinetic solve with ordinate-independent inflow g compared with the
/// diffusion limit. One row per Kn; solves run in parallel.
/// Propagates NonConvergence.
std::vector<LimitRow> limit_discrepancy(const PhaseSpaceGrid& grid, const MediumField& medium,
                                        std::span<const double> kn_list, const BoundaryData& g,
                                        const SolveOptions& options = {}, int workers = 0);

double dtn_discrepancy(const PhaseSpaceGrid& grid, const MediumField& medium, double kn,
                       const BoundaryData& g, const SolveOptions& options = {});

}  // namespace rte
