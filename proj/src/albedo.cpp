#include "rte/albedo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rte/parallel.hpp"
#include "rte/raytrace.hpp"

namespace rte {

std::string to_string(AlbedoKind kind) {
  switch (kind) {
    case AlbedoKind::full: return "full";
    case AlbedoKind::ballistic: return "ballistic";
    case AlbedoKind::single_scattering: return "single";
    case AlbedoKind::residual: return "residual";
    case AlbedoKind::difference: return "diff";
  }
  return "?";
}

AlbedoMatrix empty_albedo(const PhaseSpaceGrid& grid, AlbedoKind kind, const ScaledMedium& medium) {
  AlbedoMatrix m;
  m.kind = kind;
  m.rows = static_cast<int>(grid.outflow().size());
  m.cols = static_cast<int>(grid.inflow().size());
  m.entries.assign(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
  m.in_weights = grid.inflow_weights();
  m.out_weights = grid.outflow_weights();
  m.medium = medium.base().name;
  m.kn = medium.kn();
  return m;
}

namespace {

// Pieces of a column computed along the inflow ray. The incoming beam carries
// unit dxi mass; exits are recorded as column entries scaled back to the
// indicator basis, and (optionally) the density of second collisions is
// accumulated per cell.
struct BeamParts {
  bool uncollided = false;
  bool single = false;
  std::vector<double>* second_collisions = nullptr;
};

void add_exit(const PhaseSpaceGrid& grid, std::span<double> column, double in_weight, Vec2 from,
              int ordinate, double mass) {
  const auto exit = exit_facet(grid, from, grid.angular().direction(ordinate));
  const int i = grid.outflow_index(exit.facet, ordinate);
  column[i] += in_weight * mass / grid.outflow()[i].weight;
}

void trace_beam(const PhaseSpaceGrid& grid, const ScaledMedium& medium, int in_index,
                std::span<double> column, const BeamParts& parts) {
  const auto& g = grid.spatial();
  const auto& ang = grid.angular();
  const auto& idx = grid.inflow()[in_index];
  const double in_weight = idx.weight;
  const Vec2 x0 = grid.facets()[idx.facet].midpoint;
  const Vec2 v = ang.direction(idx.ordinate);
  const double max_step = 0.5 * std::min(g.dx, g.dy);

  double tau = 0.0;
  walk_cells(g, x0, v, [&](int cell, double t0, double t1) {
    const double sigma = medium.sigma_kn(cell);
    const double len = t1 - t0;
    if (parts.single || parts.second_collisions) {
      const double scatter_fraction = sigma > 0.0 ? medium.scattering(cell) / sigma : 0.0;
      const int n = std::max(1, static_cast<int>(std::ceil(len / max_step)));
      const double h = len / n;
      const double step_loss = -std::expm1(-sigma * h);
      for (int k = 0; k < n && scatter_fraction > 0.0; ++k) {
        const double emitted = std::exp(-(tau + sigma * k * h)) * step_loss * scatter_fraction;
        const double t = t0 + (k + 0.5) * h;
        const Vec2 y{x0.x + t * v.x, x0.y + t * v.y};
        for (int m = 0; m < ang.ntheta; ++m) {
          const double mass = emitted * ang.weights[m];
          const Vec2 u = ang.direction(m);
          double depth = 0.0;
          if (parts.second_collisions) {
            auto& second = *parts.second_collisions;
            walk_cells(g, y, u, [&](int c2, double s0, double s1) {
              const double sig2 = medium.sigma_kn(c2);
              if (sig2 > 0.0) {
                const double lost = mass * std::exp(-depth) * -std::expm1(-sig2 * (s1 - s0));
                second[c2] += lost * medium.scattering(c2) / sig2;
              }
              depth += sig2 * (s1 - s0);
            });
          } else {
            walk_cells(g, y, u, [&](int c2, double s0, double s1) { depth += medium.sigma_kn(c2) * (s1 - s0); });
          }
          if (parts.single) add_exit(grid, column, in_weight, y, m, mass * std::exp(-depth));
        }
      }
    }
    tau += sigma * len;
  });
  if (parts.uncollided) add_exit(grid, column, in_weight, x0, idx.ordinate, std::exp(-tau));
}

template <class ColumnFn>
void assemble_columns(AlbedoMatrix& m, int workers, ColumnFn&& fn) {
  std::vector<IterationReport> reports(m.cols);
  parallel_for(m.cols, workers, [&](int j) {
    try {
      reports[j] = fn(j, m.column(j));
    } catch (const NonConvergence& e) {
      throw NonConvergence(e.iterations(), e.residual(), j);
    }
  });
  for (const auto& r : reports) {
    m.worst.iterations = std::max(m.worst.iterations, r.iterations);
    m.worst.residual = std::max(m.worst.residual, r.residual);
  }
}

}  // namespace

AlbedoMatrix assemble_full(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                           const AssemblyOptions& options) {
  auto m = empty_albedo(grid, AlbedoKind::full, medium);
  SolveOptions solve = options.solve;
  solve.start_from_inflow_mean = false;
  const double area = grid.spatial().cell_area();
  const auto zero_inflow = constant_inflow(grid, 0.0);

  if (options.method == FullMethod::sweep) {
    assemble_columns(m, options.workers, [&](int j, std::span<double> column) {
      const double w = grid.inflow()[j].weight;
      const auto f = solve_transport(grid, medium, indicator_inflow(grid, j, 1.0 / w), solve);
      const auto trace = outflow_trace(grid, f);
      for (int i = 0; i < m.rows; ++i) column[i] = w * trace.values[i];
      return f.report;
    });
    return m;
  }

  assemble_columns(m, options.workers, [&](int j, std::span<double> column) {
    std::vector<double> second(grid.num_cells(), 0.0);
    trace_beam(grid, medium, j, column, {.uncollided = true, .single = true, .second_collisions = &second});
    if (std::all_of(second.begin(), second.end(), [](double s) { return s == 0.0; })) {
      return IterationReport{};
    }
    for (double& s : second) s /= area;
    const auto f = solve_transport(grid, medium, zero_inflow, solve, second);
    const auto trace = outflow_trace(grid, f);
    const double w = grid.inflow()[j].weight;
    for (int i = 0; i < m.rows; ++i) column[i] += w * trace.values[i];
    return f.report;
  });
  return m;
}

AlbedoMatrix assemble_ballistic(const PhaseSpaceGrid& grid, const ScaledMedium& medium) {
  auto m = empty_albedo(grid, AlbedoKind::ballistic, medium);
  for (int j = 0; j < m.cols; ++j) trace_beam(grid, medium, j, m.column(j), {.uncollided = true});
  return m;
}

AlbedoMatrix assemble_ballistic_swept(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                      int workers) {
  auto m = empty_albedo(grid, AlbedoKind::ballistic, medium);
  const std::vector<double> no_source(grid.num_cells(), 0.0);
  assemble_columns(m, workers, [&](int j, std::span<double> column) {
    const double w = grid.inflow()[j].weight;
    const auto f = sweep(grid, medium, no_source, indicator_inflow(grid, j, 1.0 / w));
    const auto trace = outflow_trace(grid, f);
    for (int i = 0; i < m.rows; ++i) column[i] = w * trace.values[i];
    return IterationReport{};
  });
  return m;
}

AlbedoMatrix assemble_single_scattering(const PhaseSpaceGrid& grid, const ScaledMedium& medium,
                                        int workers) {
  auto m = empty_albedo(grid, AlbedoKind::single_scattering, medium);
  assemble_columns(m, workers, [&](int j, std::span<double> column) {
    trace_beam(grid, medium, j, column, {.single = true});
    return IterationReport{};
  });
  return m;
}

std::vector<double> column_ratios(const AlbedoMatrix& m) {
  std::vector<double> r(m.cols);
  for (int j = 0; j < m.cols; ++j) {
    const auto col = m.column(j);
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i) s += std::abs(col[i]) * m.out_weights[i];
    r[j] = s / m.in_weights[j];
  }
  return r;
}

double operator_norm_l1(const AlbedoMatrix& m) {
  const auto r = column_ratios(m);
  double best = 0.0;
  for (double x : r) best = std::max(best, x);
  return best;
}

AlbedoMatrix subtract(const AlbedoMatrix& a, const AlbedoMatrix& b, AlbedoKind kind) {
  if (a.rows != b.rows || a.cols != b.cols || a.in_weights != b.in_weights ||
      a.out_weights != b.out_weights) {
    throw std::invalid_argument("albedo matrices have different index sets or weights");
  }
  AlbedoMatrix d = a;
  d.kind = kind;
  d.medium = a.medium == b.medium ? a.medium : a.medium + "-" + b.medium;
  d.worst.iterations = std::max(a.worst.iterations, b.worst.iterations);
  d.worst.residual = std::max(a.worst.residual, b.worst.residual);
  for (std::size_t k = 0; k < d.entries.size(); ++k) d.entries[k] = a.entries[k] - b.entries[k];
  return d;
}

double diff_norm(const AlbedoMatrix& a, const AlbedoMatrix& b) {
  return operator_norm_l1(subtract(a, b));
}

BoundaryFlux apply(const AlbedoMatrix& m, const BoundaryFlux& inflow) {
  if (static_cast<int>(inflow.values.size()) != m.cols) {
    throw std::invalid_argument("apply: inflow length does not match albedo columns");
  }
  BoundaryFlux out{Flow::outflow, std::vector<double>(m.rows, 0.0)};
  for (int j = 0; j < m.cols; ++j) {
    const double phi = inflow.values[j];
    if (phi == 0.0) continue;
    const auto col = m.column(j);
    for (int i = 0; i < m.rows; ++i) out.values[i] += col[i] * phi;
  }
  return out;
}

}  // namespace rte
