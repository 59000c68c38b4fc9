#include "rte/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rte {

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : cells) m = std::max(m, std::abs(v));
  return m;
}

ScalarField sample_field(const SpatialGrid& grid, ScalarFunction f) {
  ScalarField out;
  out.cells.resize(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) out.cells[c] = f(grid.center(c));
  out.analytic = std::move(f);
  return out;
}

MediumField make_medium(const SpatialGrid& grid, ScalarFunction sigma_s, ScalarFunction sigma_a,
                        std::string name, double margin) {
  if (margin > 0.0) {
    auto near_boundary = [grid, margin](Vec2 p) {
      const double d = std::min({p.x - grid.origin.x, grid.origin.x + grid.extent.x - p.x,
                                 p.y - grid.origin.y, grid.origin.y + grid.extent.y - p.y});
      return d < margin;
    };
    sigma_s = [f = std::move(sigma_s), near_boundary](Vec2 p) { return near_boundary(p) ? 0.0 : f(p); };
    sigma_a = [f = std::move(sigma_a), near_boundary](Vec2 p) { return near_boundary(p) ? 0.0 : f(p); };
  }
  MediumField m{std::move(name), sample_field(grid, std::move(sigma_s)),
                sample_field(grid, std::move(sigma_a))};
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!(m.sigma_s.cells[c] >= 0.0) || !(m.sigma_a.cells[c] >= 0.0)) {
      throw std::invalid_argument("medium '" + m.name + "' has a negative or NaN coefficient");
    }
  }
  return m;
}

MediumField constant_medium(const SpatialGrid& grid, double sigma_s, double sigma_a) {
  return make_medium(
      grid, [sigma_s](Vec2) { return sigma_s; }, [sigma_a](Vec2) { return sigma_a; },
      "constant");
}

ScaledMedium::ScaledMedium(MediumField base, double kn) : base_(std::move(base)), kn_(kn) {
  if (!(kn > 0.0)) throw std::invalid_argument("Knudsen number must be positive");
  const auto n = base_.sigma_s.cells.size();
  sigma_kn_.resize(n);
  scattering_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    scattering_[c] = base_.sigma_s.cells[c] / kn_;
    sigma_kn_[c] = kn_ * base_.sigma_a.cells[c] + scattering_[c];
  }
}

bool Ball::contains(Vec2 p) const {
  return std::hypot(p.x - center.x, p.y - center.y) < radius;
}

MediaPair make_benchmark_pair(const SpatialGrid& grid, double z, double kn) {
  if (!(z >= 0.0)) throw std::invalid_argument("contrast z must be nonnegative");
  auto zero = [](Vec2) { return 0.0; };
  auto reference = make_medium(grid, [](Vec2) { return 1.0; }, zero, "reference");
  auto perturbed = make_medium(
      grid, [z](Vec2 p) { return kBenchmarkBall.contains(p) ? 1.0 : 1.0 + z; }, zero, "perturbed");
  return {ScaledMedium(std::move(reference), kn), ScaledMedium(std::move(perturbed), kn), z};
}

CoefficientDiff linf_diff(const MediumField& a, const MediumField& b) {
  if (a.sigma_s.cells.size() != b.sigma_s.cells.size() ||
      a.sigma_a.cells.size() != b.sigma_a.cells.size()) {
    throw std::invalid_argument("linf_diff: media sampled on different grids");
  }
  CoefficientDiff d;
  for (std::size_t c = 0; c < a.sigma_s.cells.size(); ++c) {
    d.sigma_s = std::max(d.sigma_s, std::abs(a.sigma_s.cells[c] - b.sigma_s.cells[c]));
    d.sigma_a = std::max(d.sigma_a, std::abs(a.sigma_a.cells[c] - b.sigma_a.cells[c]));
  }
  return d;
}

MediumField parse_medium(const std::string& text, const SpatialGrid& grid, std::string name) {
  std::map<std::string, double> kv{{"background", 1.0}, {"ball_center_x", 0.0},
                                   {"ball_center_y", 0.0}, {"ball_radius", 0.0},
                                   {"ball_value", 1.0},    {"absorption", 0.0}};
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("medium file line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kv.contains(key)) {
      throw std::invalid_argument("medium file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      std::size_t used = 0;
      kv[key] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("medium file line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
  }
  const Ball ball{{kv["ball_center_x"], kv["ball_center_y"]}, kv["ball_radius"]};
  const double background = kv["background"];
  const double inside = kv["ball_value"];
  const double absorption = kv["absorption"];
  return make_medium(
      grid, [=](Vec2 p) { return ball.contains(p) ? inside : background; },
      [absorption](Vec2) { return absorption; }, std::move(name));
}

MediumField load_medium_file(const std::filesystem::path& path, const SpatialGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open medium file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_medium(ss.str(), grid, path.stem().string());
}

}  // namespace rte
