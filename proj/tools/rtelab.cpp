// rtelab: command-line driver for the transport, albedo and stability experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rte/albedo.hpp"
#include "rte/diffusion.hpp"
#include "rte/harness.hpp"
#include "rte/media.hpp"
#include "rte/stability.hpp"
#include "rte/transport.hpp"

namespace {

using namespace rte;

constexpr int kExitUsage = 1;
constexpr int kExitNonConverged = 2;

struct Common {
  ExperimentConfig cfg;
  std::optional<double> kn;
  std::optional<double> z;
  std::string method = "split";
  bool plot = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--nx", c.cfg.nx, "cells in x")->check(CLI::Range(2, 100000));
  app->add_option("--ny", c.cfg.ny, "cells in y")->check(CLI::Range(2, 100000));
  app->add_option("--ntheta", c.cfg.ntheta, "ordinates (even, not 2 mod 4)");
  app->add_option("--kn-list", c.cfg.kn_list, "Knudsen numbers")->delimiter(',');
  app->add_option("--z-list", c.cfg.z_list, "contrasts")->delimiter(',');
  app->add_option("--kn", c.kn, "single Knudsen number");
  app->add_option("--z", c.z, "single contrast");
  app->add_option("--tol", c.cfg.tol, "source iteration tolerance on <f>");
  app->add_option("--max-iters", c.cfg.max_iters, "source iteration cap");
  app->add_option("--out", c.cfg.out_dir, "output directory");
  app->add_option("--albedo-method", c.method, "full albedo assembly")->check(CLI::IsMember({"split", "sweep"}));
  app->add_flag("--plot", c.plot, "also write an SVG plot");
}

void finalize(Common& c, const std::string& experiment) {
  c.cfg.experiment = experiment;
  c.cfg.method = c.method == "sweep" ? FullMethod::sweep : FullMethod::split;
  if (c.kn) {
    c.cfg.kn_list = {*c.kn};
    c.cfg.lipschitz_kn = *c.kn;
  }
  if (c.z) {
    c.cfg.z_list = {*c.z};
    c.cfg.z_fixed = *c.z;
  }
}

int emit(const Common& c, const ExperimentResult& res) {
  const auto csv = to_csv(res.table);
  write_text(c.cfg.out_dir / (c.cfg.experiment + ".csv"), csv);
  if (c.plot) emit_plot(res.table, plot_spec_for(c.cfg.experiment), c.cfg.out_dir / (c.cfg.experiment + ".svg"));
  std::cout << csv;
  if (res.nonconverged) {
    std::cerr << "warning: some configurations did not converge; rows marked status=nonconverged\n";
    return kExitNonConverged;
  }
  return 0;
}

MediumField select_medium(const SpatialGrid& grid, const std::string& name, const std::string& file, double z) {
  if (!file.empty()) return load_medium_file(file, grid);
  if (name == "reference") return constant_medium(grid, 1.0);
  if (name == "benchmark-pair" || name == "paper-pair") return make_benchmark_pair(grid, z, 1.0).perturbed.base();
  if (name == "bump") return bump_medium(grid);
  throw CLI::ValidationError("--medium", "unknown medium " + name);
}

BoundaryFlux parse_inflow(const PhaseSpaceGrid& grid, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "constant") return constant_inflow(grid, arg.empty() ? 1.0 : std::stod(arg));
  if (kind == "facet") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--inflow", "expected facet:i,j");
    const int facet = std::stoi(arg.substr(0, comma));
    const int ordinate = std::stoi(arg.substr(comma + 1));
    if (facet < 0 || facet >= static_cast<int>(grid.facets().size()) || ordinate < 0 ||
        ordinate >= grid.num_ordinates()) {
      throw CLI::ValidationError("--inflow", "facet or ordinate out of range");
    }
    const int k = grid.inflow_index(facet, ordinate);
    if (k < 0) throw CLI::ValidationError("--inflow", "ordinate is not incoming on that facet");
    return indicator_inflow(grid, k);
  }
  throw CLI::ValidationError("--inflow", "expected constant:c or facet:i,j");
}

int run_solve(Common& c, const std::string& inflow_spec, const std::string& medium, const std::string& file) {
  finalize(c, "solve");
  const auto grid = c.cfg.grid();
  const double kn = c.kn.value_or(1.0);
  const ScaledMedium scaled(select_medium(grid.spatial(), medium, file, c.z.value_or(0.0)), kn);
  const auto inflow = parse_inflow(grid, inflow_spec);
  SolveOptions opts{c.cfg.tol, c.cfg.max_iters, true};
  KineticSolution f;
  try {
    f = solve_transport(grid, scaled, inflow, opts);
  } catch (const NonConvergence& e) {
    std::cerr << e.what() << '\n';
    return kExitNonConverged;
  }
  const std::string header = c.cfg.header_line() + " kn=" + format_number(kn) + " medium=" + scaled.base().name +
                             " inflow=" + inflow_spec + " iterations=" + std::to_string(f.report.iterations) +
                             " residual=" + format_number(f.report.residual) + "\n";
  const auto avg = angular_average(grid, f);
  std::string a = header + "x,y,value\n";
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    const auto p = grid.spatial().center(cell);
    a += format_number(p.x) + "," + format_number(p.y) + "," + format_number(avg[cell]) + "\n";
  }
  const auto trace = outflow_trace(grid, f);
  std::string t = header + "side,cell,ordinate,weight,value\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const auto& idx = grid.outflow()[k];
    const auto& fc = grid.facets()[idx.facet];
    t += to_string(fc.side) + "," + std::to_string(fc.index) + "," + std::to_string(idx.ordinate) + "," +
         format_number(idx.weight) + "," + format_number(trace.values[k]) + "\n";
  }
  write_text(c.cfg.out_dir / "solve_average.csv", a);
  write_text(c.cfg.out_dir / "solve_trace.csv", t);
  std::cout << "iterations=" << f.report.iterations << " residual=" << format_number(f.report.residual) << '\n';
  return 0;
}

int run_albedo_norm(Common& c, const std::string& which, const std::string& medium, const std::string& file,
                    const std::string& dump) {
  finalize(c, "albedo-norm");
  const auto grid = c.cfg.grid();
  const double kn = c.kn.value_or(1.0);
  const double z = c.z.value_or(0.0);
  const auto opts = c.cfg.assembly();
  AlbedoMatrix m;
  try {
    if (which == "diff") {
      const auto pair = make_benchmark_pair(grid.spatial(), z, kn);
      m = subtract(assemble_full(grid, pair.reference, opts), assemble_full(grid, pair.perturbed, opts));
    } else {
      const ScaledMedium scaled(select_medium(grid.spatial(), medium, file, z), kn);
      if (which == "full") {
        m = assemble_full(grid, scaled, opts);
      } else if (which == "ballistic") {
        m = assemble_ballistic(grid, scaled);
      } else if (which == "single") {
        m = assemble_single_scattering(grid, scaled, opts.workers);
      } else {
        m = subtract(subtract(assemble_full(grid, scaled, opts), assemble_ballistic(grid, scaled)),
                     assemble_single_scattering(grid, scaled, opts.workers), AlbedoKind::residual);
      }
    }
  } catch (const NonConvergence& e) {
    std::cerr << e.what() << '\n';
    return kExitNonConverged;
  }
  Table t;
  t.name = "albedo-norm";
  t.preamble.push_back(c.cfg.header_line());
  t.columns = {"kn", "z", "which", "norm", "iterations_max", "residual_max"};
  t.rows.push_back({format_number(kn), format_number(z), which, format_number(operator_norm_l1(m)),
                    std::to_string(m.worst.iterations), format_number(m.worst.residual)});
  const auto csv = to_csv(t);
  write_text(c.cfg.out_dir / "albedo-norm.csv", csv);
  std::cout << csv;
  if (!dump.empty()) {
    std::string d = c.cfg.header_line() + " which=" + which + " kn=" + format_number(kn) + "\nout_index,in_index,entry\n";
    for (int j = 0; j < m.cols; ++j) {
      for (int i = 0; i < m.rows; ++i) {
        if (m(i, j) != 0.0) d += std::to_string(i) + "," + std::to_string(j) + "," + format_number(m(i, j)) + "\n";
      }
    }
    write_text(dump, d);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary radiative transfer lab: kinetic solves, albedo operators, stability experiments"};
  app.require_subcommand(1);

  Common solve_c, norm_c, diff_c, stab_c, ball_c, lip_c, blow_c;
  std::string inflow = "constant:1", medium = "reference", medium_file, which = "full", dump;
  std::string limit_inflow = "linear-x", limit_sigma = "constant:1";

  auto* solve = app.add_subcommand("solve", "solve the transport equation and write <f> and the outflow trace");
  add_common(solve, solve_c);
  solve->add_option("--inflow", inflow, "constant:c | facet:i,j");
  solve->add_option("--medium", medium, "reference | benchmark-pair | bump");
  solve->add_option("--medium-file", medium_file, "key = value medium description");

  auto* norm = app.add_subcommand("albedo-norm", "induced L1 norm of an albedo operator");
  add_common(norm, norm_c);
  norm->add_option("--which", which, "full | ballistic | single | residual | diff")
      ->check(CLI::IsMember({"full", "ballistic", "single", "residual", "diff"}));
  norm->add_option("--medium", medium, "reference | benchmark-pair | bump");
  norm->add_option("--medium-file", medium_file, "key = value medium description");
  norm->add_option("--dump", dump, "write nonzero matrix entries as CSV");

  auto* diff = app.add_subcommand("diffusion-limit", "kinetic vs diffusion-limit discrepancy over Kn");
  add_common(diff, diff_c);
  diff_c.cfg.kn_list = {0.5, 0.25, 0.125};
  diff->add_option("--inflow", limit_inflow, "constant:c | linear-x");
  diff->add_option("--sigma", limit_sigma, "constant:1 | bump")->check(CLI::IsMember({"constant:1", "bump"}));

  auto* stab = app.add_subcommand("stability-check", "check the attenuated X-ray lower bound");
  add_common(stab, stab_c);
  stab_c.cfg.kn_list = {2.0, 1.0, 0.5, 0.25};
  stab_c.cfg.z_list = {0.1, 0.025};
  stab->add_option("--slack", stab_c.cfg.slack, "relative slack");

  auto* ball = app.add_subcommand("ballistic-decay", "||A1|| and ||A - A1|| over Kn");
  add_common(ball, ball_c);
  auto* lip = app.add_subcommand("lipschitz", "||A - A~|| over z at fixed Kn");
  add_common(lip, lip_c);
  auto* blow = app.add_subcommand("kn-blowup", "||A - A~|| over Kn at fixed z");
  add_common(blow, blow_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(solve_c, inflow, medium, medium_file);
    if (*norm) return run_albedo_norm(norm_c, which, medium, medium_file, dump);
    if (*diff) {
      finalize(diff_c, "diffusion-limit");
      LimitInflow kind = LimitInflow::linear_x;
      double value = 0.0;
      if (limit_inflow.rfind("constant", 0) == 0) {
        kind = LimitInflow::constant;
        const auto colon = limit_inflow.find(':');
        value = colon == std::string::npos ? 1.0 : std::stod(limit_inflow.substr(colon + 1));
      } else if (limit_inflow != "linear-x") {
        throw CLI::ValidationError("--inflow", "expected constant:c or linear-x (ordinate-dependent inflow needs the boundary-layer problem)");
      }
      return emit(diff_c, run_diffusion_limit(diff_c.cfg, kind, value,
                                              limit_sigma == "bump" ? LimitMedium::bump : LimitMedium::constant));
    }
    if (*stab) {
      finalize(stab_c, "stability-check");
      AlbedoCache cache;
      return emit(stab_c, run_stability_check(stab_c.cfg, &cache));
    }
    if (*ball) {
      finalize(ball_c, "ballistic-decay");
      return emit(ball_c, run_ballistic_decay(ball_c.cfg));
    }
    if (*lip) {
      finalize(lip_c, "lipschitz");
      AlbedoCache cache;
      return emit(lip_c, run_lipschitz(lip_c.cfg, &cache));
    }
    if (*blow) {
      finalize(blow_c, "kn-blowup");
      return emit(blow_c, run_kn_blowup(blow_c.cfg));
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
