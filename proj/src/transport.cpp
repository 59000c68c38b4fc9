#include "rte/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rte {

namespace {

std::string nonconvergence_message(int iterations, double residual, int column) {
  char buf[160];
  if (column >= 0) {
    std::snprintf(buf, sizeof buf, "source iteration did not converge for column %d: %d iterations, residual %.3e",
                  column, iterations, residual);
  } else {
    std::snprintf(buf, sizeof buf, "source iteration did not converge: %d iterations, residual %.3e",
                  iterations, residual);
  }
  return buf;
}

}  // namespace

NonConvergence::NonConvergence(int iterations, double residual, int column)
    : std::runtime_error(nonconvergence_message(iterations, residual, column)),
      iterations_(iterations),
      residual_(residual),
      column_(column) {}

double l1_norm(const PhaseSpaceGrid& grid, const BoundaryFlux& flux) {
  const auto& idx = flux.side == Flow::inflow ? grid.inflow() : grid.outflow();
  double s = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) s += std::abs(flux.values[k]) * idx[k].weight;
  return s;
}

BoundaryFlux constant_inflow(const PhaseSpaceGrid& grid, double value) {
  return {Flow::inflow, std::vector<double>(grid.inflow().size(), value)};
}

BoundaryFlux indicator_inflow(const PhaseSpaceGrid& grid, int inflow_index, double value) {
  BoundaryFlux b{Flow::inflow, std::vector<double>(grid.inflow().size(), 0.0)};
  b.values.at(inflow_index) = value;
  return b;
}

BoundaryFlux inflow_from(const PhaseSpaceGrid& grid, const std::function<double(Vec2, Vec2)>& g) {
  BoundaryFlux b{Flow::inflow, std::vector<double>(grid.inflow().size())};
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    const auto& idx = grid.inflow()[k];
    b.values[k] = g(grid.facets()[idx.facet].midpoint, grid.angular().direction(idx.ordinate));
  }
  return b;
}

void sweep_into(const PhaseSpaceGrid& grid, std::span<const double> sigma_total,
                std::span<const double> source, std::span<const double> inflow, std::span<double> f) {
  const auto& g = grid.spatial();
  const auto& ang = grid.angular();
  const int nx = g.nx;
  const int ny = g.ny;
  const int nc = g.num_cells();
  std::vector<double> bx(ny), by(nx);
  for (int j = 0; j < ang.ntheta; ++j) {
    const double c = ang.cosines[j];
    const double s = ang.sines[j];
    const double a = std::abs(c) / g.dx;
    const double b = std::abs(s) / g.dy;
    const Side xin = c > 0 ? Side::left : Side::right;
    const Side yin = s > 0 ? Side::bottom : Side::top;
    for (int r = 0; r < ny; ++r) bx[r] = inflow[grid.inflow_index(grid.facet_id(xin, r), j)];
    for (int q = 0; q < nx; ++q) by[q] = inflow[grid.inflow_index(grid.facet_id(yin, q), j)];

    double* fj = f.data() + static_cast<std::size_t>(j) * nc;
    const int i0 = c > 0 ? 0 : nx - 1;
    const int di = c > 0 ? 1 : -1;
    const int r0 = s > 0 ? 0 : ny - 1;
    const int dr = s > 0 ? 1 : -1;
    for (int rr = 0, r = r0; rr < ny; ++rr, r += dr) {
      for (int ii = 0, i = i0; ii < nx; ++ii, i += di) {
        const int cell = r * nx + i;
        const double fx = ii == 0 ? bx[r] : fj[cell - di];
        const double fy = rr == 0 ? by[i] : fj[cell - dr * nx];
        fj[cell] = (source[cell] + a * fx + b * fy) / (a + b + sigma_total[cell]);
      }
    }
  }
}

KineticSolution sweep(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                      std::span<const double> source, const BoundaryFlux& inflow) {
  KineticSolution out;
  out.values.resize(grid.num_unknowns());
  sweep_into(grid, medium.sigma_kn_cells(), source, inflow.values, out.values);
  out.report = {1, 0.0};
  return out;
}

std::vector<double> angular_average(const PhaseSpaceGrid& grid, std::span<const double> f) {
  const int nc = grid.num_cells();
  std::vector<double> avg(nc, 0.0);
  for (int j = 0; j < grid.num_ordinates(); ++j) {
    const double w = grid.angular().weights[j];
    const double* fj = f.data() + static_cast<std::size_t>(j) * nc;
    for (int c = 0; c < nc; ++c) avg[c] += w * fj[c];
  }
  return avg;
}

KineticSolution solve_transport(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                const BoundaryFlux& inflow, const SolveOptions& options,
                                std::span<const double> volume_source) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_transport: tol must be positive");
  const int nc = grid.num_cells();
  const auto scattering = medium.scattering_cells();
  const bool has_source = !volume_source.empty();

  std::vector<double> phi(nc, 0.0);
  if (options.start_from_inflow_mean) {
    double mass = 0.0, measure = 0.0;
    for (std::size_t k = 0; k < grid.inflow().size(); ++k) {
      mass += inflow.values[k] * grid.inflow()[k].weight;
      measure += grid.inflow()[k].weight;
    }
    std::fill(phi.begin(), phi.end(), mass / measure);
  }

  KineticSolution f;
  f.values.resize(grid.num_unknowns());
  std::vector<double> q(nc);

  const bool scatters = std::any_of(scattering.begin(), scattering.end(), [](double s) { return s != 0.0; });
  if (!scatters) {
    for (int c = 0; c < nc; ++c) q[c] = has_source ? volume_source[c] : 0.0;
    sweep_into(grid, medium.sigma_kn_cells(), q, inflow.values, f.values);
    f.report = {1, 0.0};
    return f;
  }

  double residual = INFINITY;
  for (int it = 1; it <= options.max_iters; ++it) {
    for (int c = 0; c < nc; ++c) q[c] = scattering[c] * phi[c] + (has_source ? volume_source[c] : 0.0);
    sweep_into(grid, medium.sigma_kn_cells(), q, inflow.values, f.values);
    const auto next = angular_average(grid, f.values);
    residual = 0.0;
    for (int c = 0; c < nc; ++c) residual = std::max(residual, std::abs(next[c] - phi[c]));
    phi = next;
    if (residual <= options.tol) {
      f.report = {it, residual};
      return f;
    }
  }
  throw NonConvergence(options.max_iters, residual);
}

BoundaryFlux outflow_trace(const PhaseSpaceGrid& grid, const KineticSolution& f) {
  BoundaryFlux out{Flow::outflow, std::vector<double>(grid.outflow().size())};
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const auto& idx = grid.outflow()[k];
    out.values[k] = f.at(grid, grid.facets()[idx.facet].cell, idx.ordinate);
  }
  return out;
}

double averaged_albedo(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                       const KineticSolution& f, const BoundaryFlux& inflow, int facet) {
  const auto& fc = grid.facets()[facet];
  const auto& ang = grid.angular();
  double current = 0.0;
  for (int j = 0; j < ang.ntheta; ++j) {
    const double vn = dot(ang.direction(j), fc.normal);
    const int in = grid.inflow_index(facet, j);
    const double value = in >= 0 ? inflow.values[in] : f.at(grid, fc.cell, j);
    current += ang.weights[j] * vn * value;
  }
  return current / medium.kn();
}

}  // namespace rte
