#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rte/albedo.hpp"
#include "rte/stability.hpp"

namespace rte {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kSchemeTag = "upwind1-sourceiter";

struct ExperimentConfig {
  std::string experiment = "ballistic-decay";
  int nx = 24;
  int ny = 24;
  int ntheta = 24;
  Vec2 extent{0.6, 0.6};
  std::vector<double> kn_list{2.0, 1.0, 0.5, 0.25, 0.125};
  std::vector<double> z_list{0.1, 0.05, 0.025, 0.0125};
  double z_fixed = 0.025;
  double lipschitz_kn = 1.0;
  double slack = 0.1;
  double tol = 1e-9;
  int max_iters = 50000;
  FullMethod method = FullMethod::split;
  int workers = 0;
  std::filesystem::path out_dir = ".";

  PhaseSpaceGrid grid() const { return build_grid(nx, ny, ntheta, extent); }
  AssemblyOptions assembly() const;
  /// '#' line echoing the configuration; no timestamps.
  std::string header_line() const;
};

/// CSV table: '#' preamble lines, one column-name line, data rows, '#' footer lines.
struct Table {
  std::string name;
  std::vector<std::string> preamble;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;

  int column(std::string_view col) const;
  double number(std::size_t row, std::string_view col) const;
  const std::string& cell(std::size_t row, std::string_view col) const;
};

std::string format_number(double v);
std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Memo of assembled full operators, keyed by medium, contrast and Kn.
class AlbedoCache {
 public:
  std::shared_ptr<const AlbedoMatrix> full(const PhaseSpaceGrid& grid, const MediaPair& pair,
                                           bool perturbed, const AssemblyOptions& options);

 private:
  std::map<std::string, std::shared_ptr<const AlbedoMatrix>> store_;
};

struct ExperimentResult {
  Table table;
  std::optional<LinearFit> fit;
  bool nonconverged = false;
};

ExperimentResult run_ballistic_decay(const ExperimentConfig& cfg, AlbedoCache* cache = nullptr);
ExperimentResult run_lipschitz(const ExperimentConfig& cfg, AlbedoCache* cache = nullptr);
ExperimentResult run_kn_blowup(const ExperimentConfig& cfg, AlbedoCache* cache = nullptr);
ExperimentResult run_stability_check(const ExperimentConfig& cfg, AlbedoCache* cache = nullptr);

enum class LimitInflow { constant, linear_x };
enum class LimitMedium { constant, bump };
ExperimentResult run_diffusion_limit(const ExperimentConfig& cfg, LimitInflow inflow, double constant_value,
                                     LimitMedium medium);

MediumField bump_medium(const SpatialGrid& grid);

struct PlotSpec {
  std::string x_column;
  std::string y_column;
  bool log_y = false;
  std::string title;
};

PlotSpec plot_spec_for(const std::string& experiment);

/// Standalone SVG line plot of two table columns; the plotted CSV data is
/// embedded verbatim in a <metadata> block. Throws on an empty table or an
/// unwritable path.
void emit_plot(const Table& table, const PlotSpec& spec, const std::filesystem::path& path);
std::string render_plot(const Table& table, const PlotSpec& spec);
/// Extracts the embedded data block of a plot produced by render_plot.
Table plot_data(const std::string& svg);

}  // namespace rte
