#include "rte/diffusion.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rte/parallel.hpp"

namespace rte {

double diffusion_coefficient(const AngularGrid& angular) {
  double c = 0.0;
  for (int j = 0; j < angular.ntheta; ++j) c += angular.weights[j] * angular.cosines[j] * angular.cosines[j];
  return c;
}

std::vector<double> facet_values(const PhaseSpaceGrid& grid, const BoundaryData& g) {
  std::vector<double> out(grid.facets().size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = g(grid.facets()[f].midpoint);
  return out;
}

DiffusionSolution solve_diffusion(const PhaseSpaceGrid& grid, const MediumField& medium,
                                  std::span<const double> facet_data, double coefficient,
                                  std::span<const double> source, double tol) {
  const auto& g = grid.spatial();
  const int n = g.num_cells();
  if (facet_data.size() != grid.facets().size()) {
    throw std::invalid_argument("solve_diffusion: one boundary value per facet required");
  }
  for (int c = 0; c < n; ++c) {
    if (!(medium.sigma_s.cells[c] > 0.0)) {
      throw std::invalid_argument("solve_diffusion: sigma_s must be positive everywhere (singular system)");
    }
  }
  const auto& sig = medium.sigma_s.cells;
  const auto& absorb = medium.sigma_a.cells;

  // Assembled as the SPD operator -C div(sigma^-1 grad) + sigma_a.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(5 * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  auto face = [&](int c, int nb, double h2) { return coefficient * 2.0 / (sig[c] + sig[nb]) / h2; };
  auto wall = [&](int c, double h2) { return coefficient * 2.0 / sig[c] / h2; };
  const double hx2 = g.dx * g.dx;
  const double hy2 = g.dy * g.dy;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.cell(i, j);
      double diag = absorb[c];
      auto couple = [&](int nb, double h2) {
        const double k = face(c, nb, h2);
        diag += k;
        triplets.emplace_back(c, nb, -k);
      };
      auto dirichlet = [&](Side side, int index, double h2) {
        const double k = wall(c, h2);
        diag += k;
        rhs[c] += k * facet_data[grid.facet_id(side, index)];
      };
      if (i > 0) couple(g.cell(i - 1, j), hx2); else dirichlet(Side::left, j, hx2);
      if (i < g.nx - 1) couple(g.cell(i + 1, j), hx2); else dirichlet(Side::right, j, hx2);
      if (j > 0) couple(g.cell(i, j - 1), hy2); else dirichlet(Side::bottom, i, hy2);
      if (j < g.ny - 1) couple(g.cell(i, j + 1), hy2); else dirichlet(Side::top, i, hy2);
      triplets.emplace_back(c, c, diag);
      if (!source.empty()) rhs[c] += source[c];
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setMaxIterations(20 * n);
  cg.compute(a);
  // Relative tolerance tight enough that the absolute max-norm residual meets tol.
  cg.setTolerance(std::max(1e-15, tol / std::max(1.0, rhs.norm()) * 1e-2));
  Eigen::VectorXd rho = cg.solve(rhs);

  DiffusionSolution sol;
  sol.rho.assign(rho.data(), rho.data() + n);
  sol.boundary.assign(facet_data.begin(), facet_data.end());
  sol.coefficient = coefficient;
  sol.iterations = static_cast<int>(cg.iterations());
  sol.residual = (a * rho - rhs).cwiseAbs().maxCoeff();
  return sol;
}

std::vector<double> normal_derivative(const PhaseSpaceGrid& grid, const DiffusionSolution& sol) {
  const auto& g = grid.spatial();
  std::vector<double> dn(grid.facets().size());
  for (std::size_t f = 0; f < dn.size(); ++f) {
    const auto& fc = grid.facets()[f];
    const int i = g.cell_i(fc.cell);
    const int j = g.cell_j(fc.cell);
    int inner = fc.cell;
    double h = g.dx;
    switch (fc.side) {
      case Side::left: inner = g.cell(i + 1, j); break;
      case Side::right: inner = g.cell(i - 1, j); break;
      case Side::bottom: inner = g.cell(i, j + 1); h = g.dy; break;
      case Side::top: inner = g.cell(i, j - 1); h = g.dy; break;
    }
    dn[f] = (8.0 * sol.boundary[f] - 9.0 * sol.rho[fc.cell] + sol.rho[inner]) / (3.0 * h);
  }
  return dn;
}

std::vector<double> dirichlet_to_neumann(const PhaseSpaceGrid& grid, const MediumField& medium,
                                         const DiffusionSolution& sol) {
  auto dn = normal_derivative(grid, sol);
  for (std::size_t f = 0; f < dn.size(); ++f) {
    dn[f] *= -sol.coefficient / medium.sigma_s.cells[grid.facets()[f].cell];
  }
  return dn;
}

namespace {

LimitRow compare_with_limit(const PhaseSpaceGrid& grid, const MediumField& medium, double kn,
                            const BoundaryData& g, const DiffusionSolution& limit,
                            const std::vector<double>& dtn, const SolveOptions& options) {
  const ScaledMedium scaled(medium, kn);
  const auto inflow = inflow_from(grid, [&](Vec2 x, Vec2) { return g(x); });
  const auto f = solve_transport(grid, scaled, inflow, options);
  const auto avg = angular_average(grid, f);
  LimitRow row;
  row.kn = kn;
  row.iterations = f.report.iterations;
  for (int c = 0; c < grid.num_cells(); ++c) row.err_linf = std::max(row.err_linf, std::abs(avg[c] - limit.rho[c]));
  for (int k = 0; k < static_cast<int>(grid.facets().size()); ++k) {
    const double current = averaged_albedo(grid, scaled, f, inflow, k);
    row.dtn_disc = std::max(row.dtn_disc, std::abs(current - dtn[k]));
  }
  return row;
}

}  // namespace

std::vector<LimitRow> limit_discrepancy(const PhaseSpaceGrid& grid, const MediumField& medium,
                                        std::span<const double> kn_list, const BoundaryData& g,
                                        const SolveOptions& options, int workers) {
  const double c = diffusion_coefficient(grid.angular());
  const auto limit = solve_diffusion(grid, medium, facet_values(grid, g), c);
  const auto dtn = dirichlet_to_neumann(grid, medium, limit);
  std::vector<LimitRow> rows(kn_list.size());
  parallel_for(static_cast<int>(kn_list.size()), workers, [&](int k) {
    rows[k] = compare_with_limit(grid, medium, kn_list[k], g, limit, dtn, options);
  });
  return rows;
}

double dtn_discrepancy(const PhaseSpaceGrid& grid, const MediumField& medium, double kn,
                       const BoundaryData& g, const SolveOptions& options) {
  const double c = diffusion_coefficient(grid.angular());
  const auto limit = solve_diffusion(grid, medium, facet_values(grid, g), c);
  const auto dtn = dirichlet_to_neumann(grid, medium, limit);
  return compare_with_limit(grid, medium, kn, g, limit, dtn, options).dtn_disc;
}

}  // namespace rte
