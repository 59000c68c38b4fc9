#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rte/albedo.hpp"
#include "rte/media.hpp"
#include "rte/phase_grid.hpp"

namespace rte {

/// Lower speed bound; all ordinates have unit speed.
inline constexpr double kMinSpeed = 1.0;

/// diam(Omega) / M1 * (Kn (|sigma_a| + |~sigma_a|) + Kn^-1 (|sigma_s| + |~sigma_s|)),
/// sup norms taken over cell samples.
double beta_kn(const MediaPair& pair, const SpatialGrid& grid);

struct RayBound {
  int inflow_index = 0;
  double xray = 0.0;         // X(sigma_Kn - ~sigma_Kn) along the inflow ray
  double lower_bound = 0.0;  // e^-beta |xray|
  bool pass = true;
};

struct StabilityReport {
  double kn = 0.0;
  double z = 0.0;
  double beta_kn = 0.0;
  double diff_norm = 0.0;
  double max_lower_bound = 0.0;
  double worst_slack_ratio = 0.0;  // max lower_bound / diff_norm
  bool pass = true;
  std::vector<RayBound> rays;
  IterationReport worst;
};

/// Checks ||A - ~A|| >= e^-beta |X(sigma_Kn - ~sigma_Kn)| on every inflow ray,
/// allowing a relative slack for discretization error.
StabilityReport check_inequality(const PhaseSpaceGrid& grid, const MediaPair& pair,
                                 const AlbedoMatrix& reference, const AlbedoMatrix& perturbed,
                                 double slack = 0.1);

/// Assembles both full albedo operators and checks the inequality.
StabilityReport check_inequality(const PhaseSpaceGrid& grid, const MediaPair& pair, double slack = 0.1,
                                 const AssemblyOptions& options = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

class NonPositiveData : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Least-squares line through (x, y). Needs at least 3 points.
LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys);

/// Least-squares line through (x, ln y). Throws NonPositiveData if some y <= 0.
LinearFit fit_loglinear(std::span<const double> xs, std::span<const double> ys);

}  // namespace rte
