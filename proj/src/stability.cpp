#include "rte/stability.hpp"

#include <algorithm>
#include <cmath>

#include "rte/raytrace.hpp"

namespace rte {

double beta_kn(const MediaPair& pair, const SpatialGrid& grid) {
  const auto& a = pair.reference.base();
  const auto& b = pair.perturbed.base();
  const double kn = pair.reference.kn();
  const double absorption = a.sigma_a.sup_norm() + b.sigma_a.sup_norm();
  const double scattering = a.sigma_s.sup_norm() + b.sigma_s.sup_norm();
  return grid.diameter() / kMinSpeed * (kn * absorption + scattering / kn);
}

StabilityReport check_inequality(const PhaseSpaceGrid& grid, const MediaPair& pair,
                                 const AlbedoMatrix& reference, const AlbedoMatrix& perturbed,
                                 double slack) {
  StabilityReport r;
  r.kn = pair.reference.kn();
  r.z = pair.z;
  r.beta_kn = beta_kn(pair, grid.spatial());
  r.diff_norm = diff_norm(reference, perturbed);
  r.worst.iterations = std::max(reference.worst.iterations, perturbed.worst.iterations);
  r.worst.residual = std::max(reference.worst.residual, perturbed.worst.residual);

  std::vector<double> delta(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    delta[c] = pair.reference.sigma_kn(c) - pair.perturbed.sigma_kn(c);
  }
  const double damping = std::exp(-r.beta_kn);
  r.rays.reserve(grid.inflow().size());
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
    const auto& idx = grid.inflow()[k];
    RayBound b;
    b.inflow_index = k;
    b.xray = xray_transform(grid.spatial(), delta, grid.facets()[idx.facet].midpoint,
                            grid.angular().direction(idx.ordinate));
    b.lower_bound = damping * std::abs(b.xray);
    b.pass = b.lower_bound <= (1.0 + slack) * r.diff_norm;
    r.max_lower_bound = std::max(r.max_lower_bound, b.lower_bound);
    r.pass = r.pass && b.pass;
    r.rays.push_back(b);
  }
  r.worst_slack_ratio = r.diff_norm > 0.0 ? r.max_lower_bound / r.diff_norm
                        : r.max_lower_bound > 0.0 ? INFINITY
                                                  : 0.0;
  return r;
}

StabilityReport check_inequality(const PhaseSpaceGrid& grid, const MediaPair& pair, double slack,
                                 const AssemblyOptions& options) {
  const auto a = assemble_full(grid, pair.reference, options);
  const auto b = assemble_full(grid, pair.perturbed, options);
  return check_inequality(grid, pair, a, b, slack);
}

LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys differ in length");
  if (xs.size() < 3) throw std::invalid_argument("fit: at least 3 points required");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit: xs are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

LinearFit fit_loglinear(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> logs(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (!(ys[k] > 0.0)) throw NonPositiveData("log fit requires positive data");
    logs[k] = std::log(ys[k]);
  }
  return fit_linear(xs, logs);
}

}  // namespace rte
