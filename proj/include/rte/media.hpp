#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rte/phase_grid.hpp"

namespace rte {

using ScalarFunction = std::function<double(Vec2)>;

/// Cellwise-constant field sampled at cell centers, kept together with the
/// closure it was sampled from.
struct ScalarField {
  ScalarFunction analytic;
  std::vector<double> cells;

  double operator()(Vec2 p) const { return analytic(p); }
  double at(int cell) const { return cells[cell]; }
  double sup_norm() const;
};

ScalarField sample_field(const SpatialGrid& grid, ScalarFunction f);

struct MediumField {
  std::string name;
  ScalarField sigma_s;
  ScalarField sigma_a;
};

/// Samples a medium on the grid. A positive margin zeroes both coefficients in
/// cells whose center lies closer than margin to the boundary.
MediumField make_medium(const SpatialGrid& grid, ScalarFunction sigma_s, ScalarFunction sigma_a,
                        std::string name, double margin = 0.0);

MediumField constant_medium(const SpatialGrid& grid, double sigma_s, double sigma_a = 0.0);

/// Medium in the Knudsen scaling: total attenuation sigma_Kn = Kn sigma_a + sigma_s / Kn
/// and isotropic scattering strength sigma_s / Kn.
class ScaledMedium {
 public:
  ScaledMedium(MediumField base, double kn);

  const MediumField& base() const { return base_; }
  double kn() const { return kn_; }
  int num_cells() const { return static_cast<int>(sigma_kn_.size()); }

  double sigma_kn(int cell) const { return sigma_kn_[cell]; }
  double scattering(int cell) const { return scattering_[cell]; }
  std::span<const double> sigma_kn_cells() const { return sigma_kn_; }
  std::span<const double> scattering_cells() const { return scattering_; }

  double sigma_kn_at(Vec2 p) const { return kn_ * base_.sigma_a(p) + base_.sigma_s(p) / kn_; }

 private:
  MediumField base_;
  double kn_;
  std::vector<double> sigma_kn_;
  std::vector<double> scattering_;
};

struct Ball {
  Vec2 center;
  double radius = 0.0;

  /// Strict interior test; cells on the rim are resolved by their center only.
  bool contains(Vec2 p) const;
};

inline constexpr Ball kBenchmarkBall{{0.3, 0.3}, 0.2};

/// Reference sigma_s = 1 and perturbed sigma_s = 1 in the ball, 1 + z outside;
/// sigma_a = 0 in both.
struct MediaPair {
  ScaledMedium reference;
  ScaledMedium perturbed;
  double z = 0.0;
};

MediaPair make_benchmark_pair(const SpatialGrid& grid, double z, double kn);

struct CoefficientDiff {
  double sigma_s = 0.0;
  double sigma_a = 0.0;
};

/// Max over cell centers of |a - b| for each coefficient.
CoefficientDiff linf_diff(const MediumField& a, const MediumField& b);

/// Piecewise-constant ball medium read from `key = value` lines. Keys:
/// background, ball_center_x, ball_center_y, ball_radius, ball_value and the
/// optional absorption (uniform sigma_a). '#' starts a comment.
MediumField load_medium_file(const std::filesystem::path& path, const SpatialGrid& grid);
MediumField parse_medium(const std::string& text, const SpatialGrid& grid, std::string name);

}  // namespace rte
