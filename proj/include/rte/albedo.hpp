#pragma once

#include <span>
#include <string>
#include <vector>

#include "rte/media.hpp"
#include "rte/phase_grid.hpp"
#include "rte/transport.hpp"

namespace rte {

enum class AlbedoKind { full, ballistic, single_scattering, residual, difference };

std::string to_string(AlbedoKind kind);

/// Dense map from inflow values on Gamma_- to outflow values on Gamma_+,
/// stored column-major (one column per inflow index).
struct AlbedoMatrix {
  AlbedoKind kind = AlbedoKind::full;
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;
  std::vector<double> in_weights;
  std::vector<double> out_weights;
  std::string medium;
  double kn = 0.0;
  /// Worst transport solve over all columns (zero when no solves were needed).
  IterationReport worst;

  double operator()(int i, int j) const { return entries[static_cast<std::size_t>(j) * rows + i]; }
  double& operator()(int i, int j) { return entries[static_cast<std::size_t>(j) * rows + i]; }
  std::span<const double> column(int j) const {
    return {entries.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)};
  }
  std::span<double> column(int j) {
    return {entries.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)};
  }
};

AlbedoMatrix empty_albedo(const PhaseSpaceGrid& grid, AlbedoKind kind, const ScaledMedium& medium);

enum class FullMethod {
  /// Uncollided and once-scattered parts by exact ray tracing; the multiply
  /// scattered remainder by upwind source iteration with the exact
  /// second-collision density as volume source.
  split,
  /// Every column is the trace of an upwind solve with indicator inflow.
  sweep,
};

struct AssemblyOptions {
  SolveOptions solve{.tol = 1e-9, .max_iters = 50000, .start_from_inflow_mean = false};
  FullMethod method = FullMethod::split;
  int workers = 0;  // 0: default_workers()
};

/// Full albedo operator over the single-index indicator basis.
/// Throws NonConvergence naming the lowest failing column.
AlbedoMatrix assemble_full(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                           const AssemblyOptions& options = {});

/// Unscattered part: column j has the single entry exp(-X sigma_Kn) along the
/// inflow ray of j, scaled by in/out weights so that column mass is preserved.
AlbedoMatrix assemble_ballistic(const PhaseSpaceGrid& grid, const ScaledMedium& medium);

/// Ballistic operator obtained by sweeping the pure attenuation equation on
/// the grid. Cross-check only; carries the upwind numerical diffusion.
AlbedoMatrix assemble_ballistic_swept(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                      int workers = 0);

/// Once-scattered part by quadrature along each inflow ray (step <= dx/2).
AlbedoMatrix assemble_single_scattering(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                        int workers = 0);

/// Exact induced L1(dxi) -> L1(dxi) norm: max_j sum_i |M(i,j)| w_out(i) / w_in(j).
double operator_norm_l1(const AlbedoMatrix& m);

/// Per-column ratio sum_i |M(i,j)| w_out(i) / w_in(j).
std::vector<double> column_ratios(const AlbedoMatrix& m);

/// Entrywise a - b. Throws std::invalid_argument on shape or weight mismatch.
AlbedoMatrix subtract(const AlbedoMatrix& a, const AlbedoMatrix& b,
                      AlbedoKind kind = AlbedoKind::difference);

double diff_norm(const AlbedoMatrix& a, const AlbedoMatrix& b);

/// Applies the matrix to inflow data.
BoundaryFlux apply(const AlbedoMatrix& m, const BoundaryFlux& inflow);

}  // namespace rte
