#include "rte/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rte/diffusion.hpp"
#include "rte/raytrace.hpp"

namespace rte {

AssemblyOptions ExperimentConfig::assembly() const {
  AssemblyOptions o;
  o.solve.tol = tol;
  o.solve.max_iters = max_iters;
  o.method = method;
  o.workers = workers;
  return o;
}

std::string ExperimentConfig::header_line() const {
  std::ostringstream s;
  s << "# experiment=" << experiment << " grid=" << nx << "x" << ny << "x" << ntheta
    << " extent=" << format_number(extent.x) << "x" << format_number(extent.y)
    << " tol=" << format_number(tol) << " max_iters=" << max_iters << " scheme=" << kSchemeTag
    << " albedo=" << (method == FullMethod::split ? "split" : "sweep") << " version=" << kVersion;
  return s.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

int Table::column(std::string_view col) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == col) return static_cast<int>(k);
  }
  throw std::out_of_range("table " + name + " has no column '" + std::string(col) + "'");
}

const std::string& Table::cell(std::size_t row, std::string_view col) const {
  return rows.at(row).at(column(col));
}

double Table::number(std::size_t row, std::string_view col) const {
  const auto& s = cell(row, col);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fit_line(const std::string& what, const LinearFit& f) {
  return "# fit " + what + " slope=" + format_number(f.slope) + " intercept=" + format_number(f.intercept) +
         " r2=" + format_number(f.r2);
}

constexpr const char* kConverged = "ok";
constexpr const char* kNonConverged = "nonconverged";

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (const auto& p : table.preamble) out += p + '\n';
  out += join(table.columns) + '\n';
  for (const auto& r : table.rows) out += join(r) + '\n';
  for (const auto& f : table.footer) out += f + '\n';
  return out;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      (have_columns ? t.footer : t.preamble).push_back(line);
    } else if (!have_columns) {
      t.columns = split(line);
      have_columns = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::shared_ptr<const AlbedoMatrix> AlbedoCache::full(const PhaseSpaceGrid& grid, const MediaPair& pair,
                                                      bool perturbed, const AssemblyOptions& options) {
  const auto& medium = perturbed ? pair.perturbed : pair.reference;
  // The reference medium does not depend on z.
  std::string key = grid.describe() + "|" + medium.base().name + "|" +
                    (perturbed ? format_number(pair.z) : std::string("-")) + "|" +
                    format_number(medium.kn()) + "|" + format_number(options.solve.tol) + "|" +
                    std::to_string(options.solve.max_iters) + "|" +
                    (options.method == FullMethod::split ? "split" : "sweep");
  if (auto it = store_.find(key); it != store_.end()) return it->second;
  auto m = std::make_shared<const AlbedoMatrix>(assemble_full(grid, medium, options));
  store_.emplace(key, m);
  return m;
}

namespace {

std::shared_ptr<const AlbedoMatrix> full_operator(AlbedoCache* cache, const PhaseSpaceGrid& grid,
                                                  const MediaPair& pair, bool perturbed,
                                                  const AssemblyOptions& options) {
  if (cache) return cache->full(grid, pair, perturbed, options);
  return std::make_shared<const AlbedoMatrix>(
      assemble_full(grid, perturbed ? pair.perturbed : pair.reference, options));
}

Table start_table(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  Table t;
  t.name = cfg.experiment;
  t.preamble.push_back(cfg.header_line());
  t.columns = std::move(columns);
  return t;
}

}  // namespace

ExperimentResult run_ballistic_decay(const ExperimentConfig& cfg, AlbedoCache* cache) {
  const auto grid = cfg.grid();
  ExperimentResult res;
  res.table = start_table(cfg, {"kn", "inv_kn", "norm_A1", "norm_A_minus_A1", "iterations_max", "status"});
  std::vector<double> xs, ys;
  double l_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
    l_min = std::min(l_min, inflow_ray(grid, k).exit_time);
  }
  for (double kn : cfg.kn_list) {
    const auto pair = make_benchmark_pair(grid.spatial(), 0.0, kn);
    const double a1 = operator_norm_l1(assemble_ballistic(grid, pair.reference));
    double rest = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    std::string status = kConverged;
    try {
      const auto a = full_operator(cache, grid, pair, false, cfg.assembly());
      rest = diff_norm(*a, assemble_ballistic(grid, pair.reference));
      iterations = a->worst.iterations;
      xs.push_back(1.0 / kn);
      ys.push_back(a1);
    } catch (const NonConvergence& e) {
      status = kNonConverged;
      iterations = e.iterations();
      res.nonconverged = true;
    }
    res.table.rows.push_back({format_number(kn), format_number(1.0 / kn), format_number(a1), format_number(rest),
                              std::to_string(iterations), status});
  }
  res.table.footer.push_back("# l_min=" + format_number(l_min));
  if (xs.size() >= 3) {
    res.fit = fit_loglinear(xs, ys);
    res.table.footer.push_back(fit_line("ln(norm_A1)~inv_kn", *res.fit));
  }
  return res;
}

ExperimentResult run_lipschitz(const ExperimentConfig& cfg, AlbedoCache* cache) {
  const auto grid = cfg.grid();
  ExperimentResult res;
  res.table = start_table(cfg, {"z", "diff_norm", "iterations_max", "status"});
  std::vector<double> xs, ys;
  std::vector<double> zs{0.0};
  zs.insert(zs.end(), cfg.z_list.begin(), cfg.z_list.end());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double z = zs[k];
    const auto pair = make_benchmark_pair(grid.spatial(), z, cfg.lipschitz_kn);
    double d = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    std::string status = k == 0 ? "control" : kConverged;
    try {
      const auto a = full_operator(cache, grid, pair, false, cfg.assembly());
      const auto b = full_operator(cache, grid, pair, true, cfg.assembly());
      d = diff_norm(*a, *b);
      iterations = std::max(a->worst.iterations, b->worst.iterations);
      if (k > 0) {
        xs.push_back(z);
        ys.push_back(d);
      }
    } catch (const NonConvergence& e) {
      status = kNonConverged;
      iterations = e.iterations();
      res.nonconverged = true;
    }
    res.table.rows.push_back({format_number(z), format_number(d), std::to_string(iterations), status});
  }
  if (xs.size() >= 3) {
    res.fit = fit_linear(xs, ys);
    res.table.footer.push_back(fit_line("diff_norm~z", *res.fit));
  }
  return res;
}

ExperimentResult run_kn_blowup(const ExperimentConfig& cfg, AlbedoCache* cache) {
  const auto grid = cfg.grid();
  ExperimentResult res;
  res.table = start_table(cfg, {"kn", "inv_kn", "diff_norm", "ln_diff_norm", "beta_kn", "envelope",
                                "iterations_max", "status"});
  std::vector<double> xs, ys;
  for (double kn : cfg.kn_list) {
    const auto pair = make_benchmark_pair(grid.spatial(), cfg.z_fixed, kn);
    const double beta = beta_kn(pair, grid.spatial());
    double d = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    std::string status = kConverged;
    try {
      const auto a = full_operator(cache, grid, pair, false, cfg.assembly());
      const auto b = full_operator(cache, grid, pair, true, cfg.assembly());
      d = diff_norm(*a, *b);
      iterations = std::max(a->worst.iterations, b->worst.iterations);
      xs.push_back(1.0 / kn);
      ys.push_back(d);
    } catch (const NonConvergence& e) {
      status = kNonConverged;
      iterations = e.iterations();
      res.nonconverged = true;
    }
    res.table.rows.push_back({format_number(kn), format_number(1.0 / kn), format_number(d),
                              format_number(std::log(d)), format_number(beta),
                              format_number(std::exp(beta) * d), std::to_string(iterations), status});
  }
  if (xs.size() >= 3) {
    res.fit = fit_loglinear(xs, ys);
    res.table.footer.push_back(fit_line("ln(diff_norm)~inv_kn", *res.fit));
  }
  return res;
}

ExperimentResult run_stability_check(const ExperimentConfig& cfg, AlbedoCache* cache) {
  const auto grid = cfg.grid();
  ExperimentResult res;
  res.table = start_table(cfg, {"kn", "z", "beta_kn", "diff_norm", "max_lower_bound", "worst_slack_ratio",
                                "pass", "status"});
  res.table.preamble.push_back("# slack=" + format_number(cfg.slack));
  for (double z : cfg.z_list) {
    for (double kn : cfg.kn_list) {
      const auto pair = make_benchmark_pair(grid.spatial(), z, kn);
      try {
        const auto a = full_operator(cache, grid, pair, false, cfg.assembly());
        const auto b = full_operator(cache, grid, pair, true, cfg.assembly());
        const auto r = check_inequality(grid, pair, *a, *b, cfg.slack);
        res.table.rows.push_back({format_number(kn), format_number(z), format_number(r.beta_kn),
                                  format_number(r.diff_norm), format_number(r.max_lower_bound),
                                  format_number(r.worst_slack_ratio), r.pass ? "true" : "false", kConverged});
      } catch (const NonConvergence&) {
        res.nonconverged = true;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        res.table.rows.push_back({format_number(kn), format_number(z), format_number(beta_kn(pair, grid.spatial())),
                                  format_number(nan), format_number(nan), format_number(nan), "false",
                                  kNonConverged});
      }
    }
  }
  return res;
}

MediumField bump_medium(const SpatialGrid& grid) {
  const Vec2 c{grid.origin.x + 0.5 * grid.extent.x, grid.origin.y + 0.5 * grid.extent.y};
  const double width = 0.25 * std::min(grid.extent.x, grid.extent.y);
  return make_medium(
      grid,
      [c, width](Vec2 p) {
        const double r2 = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
        return 1.0 + 0.5 * std::exp(-r2 / (2.0 * width * width));
      },
      [](Vec2) { return 0.0; }, "bump");
}

ExperimentResult run_diffusion_limit(const ExperimentConfig& cfg, LimitInflow inflow, double constant_value,
                                     LimitMedium medium) {
  const auto grid = cfg.grid();
  const auto field = medium == LimitMedium::bump ? bump_medium(grid.spatial()) : constant_medium(grid.spatial(), 1.0);
  BoundaryData g;
  if (inflow == LimitInflow::linear_x) {
    g = [](Vec2 p) { return p.x; };
  } else {
    g = [constant_value](Vec2) { return constant_value; };
  }
  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.max_iters = cfg.max_iters;

  ExperimentResult res;
  res.table = start_table(cfg, {"kn", "err_linf", "dtn_disc", "iterations", "status"});
  res.table.preamble.push_back(std::string("# inflow=") +
                               (inflow == LimitInflow::linear_x ? "linear-x" : "constant:" + format_number(constant_value)) +
                               " sigma=" + (medium == LimitMedium::bump ? "bump" : "constant:1") +
                               " diffusion_coefficient=" + format_number(diffusion_coefficient(grid.angular())));
  for (double kn : cfg.kn_list) {
    const double one[] = {kn};
    try {
      const auto row = limit_discrepancy(grid, field, one, g, opts, 1).front();
      res.table.rows.push_back({format_number(kn), format_number(row.err_linf), format_number(row.dtn_disc),
                                std::to_string(row.iterations), kConverged});
    } catch (const NonConvergence& e) {
      res.nonconverged = true;
      res.table.rows.push_back({format_number(kn), "nan", "nan", std::to_string(e.iterations()), kNonConverged});
    }
  }
  return res;
}

PlotSpec plot_spec_for(const std::string& experiment) {
  if (experiment == "ballistic-decay") return {"inv_kn", "norm_A1", true, "ln ||A1|| vs 1/Kn"};
  if (experiment == "lipschitz") return {"z", "diff_norm", false, "||A - A~|| vs z"};
  if (experiment == "kn-blowup") return {"inv_kn", "diff_norm", true, "ln ||A - A~|| vs 1/Kn"};
  if (experiment == "diffusion-limit") return {"kn", "err_linf", false, "max |<f> - rho| vs Kn"};
  if (experiment == "stability-check") return {"kn", "worst_slack_ratio", false, "worst slack ratio vs Kn"};
  throw std::invalid_argument("no plot layout for experiment " + experiment);
}

std::string render_plot(const Table& table, const PlotSpec& spec) {
  if (table.rows.empty()) throw std::invalid_argument("emit_plot: table is empty");
  const int xc = table.column(spec.x_column);
  const int yc = table.column(spec.y_column);

  Table data;
  data.columns = {spec.x_column, spec.y_column};
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table.rows) {
    data.rows.push_back({r[xc], r[yc]});
    const double x = r[xc] == "nan" ? NAN : std::stod(r[xc]);
    double y = r[yc] == "nan" ? NAN : std::stod(r[yc]);
    if (spec.log_y) y = y > 0 ? std::log(y) : NAN;
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }

  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (pts.empty()) x0 = x1 = y0 = y1 = 0.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
    << W << ' ' << H << "\">\n"
    << "<metadata id=\"plot-data\"><![CDATA[\n" << to_csv(data) << "]]></metadata>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << spec.title << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    s << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << text << "</text>\n";
  };
  label(L, H - B + 16, format_number(x0), "middle");
  label(W - R, H - B + 16, format_number(x1), "middle");
  label(L - 6, H - B, format_number(y0), "end");
  label(L - 6, T + 4, format_number(y1), "end");
  label((L + W - R) / 2, H - 12, spec.x_column, "middle");
  label(14, T - 12, spec.log_y ? "ln " + spec.y_column : spec.y_column, "start");
  if (!pts.empty()) {
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    for (auto [x, y] : pts) s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const Table& table, const PlotSpec& spec, const std::filesystem::path& path) {
  write_text(path, render_plot(table, spec));
}

Table plot_data(const std::string& svg) {
  const std::string open = "<![CDATA[\n";
  const auto b = svg.find(open);
  const auto e = svg.find("]]>", b);
  if (b == std::string::npos || e == std::string::npos) throw std::invalid_argument("plot has no data block");
  return parse_csv(svg.substr(b + open.size(), e - b - open.size()));
}

}  // namespace rte
