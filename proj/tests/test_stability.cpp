#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rte/stability.hpp"

using namespace rte;

namespace {

const SpatialGrid& grid24() {
  static const auto g = build_grid(24, 24, 24, {0.6, 0.6}).spatial();
  return g;
}

AssemblyOptions serial() {
  AssemblyOptions o;
  o.workers = 1;
  return o;
}

}  // namespace

TEST_CASE("beta examples") {
  const double diam = 0.6 * std::sqrt(2.0);
  CHECK(beta_kn(make_benchmark_pair(grid24(), 0.1, 1.0), grid24()) == doctest::Approx(diam * 2.1).epsilon(1e-14));
  CHECK(beta_kn(make_benchmark_pair(grid24(), 0.1, 1.0), grid24()) == doctest::Approx(1.78191).epsilon(1e-5));
  CHECK(beta_kn(make_benchmark_pair(grid24(), 0.1, 0.5), grid24()) == doctest::Approx(3.56382).epsilon(1e-5));
  for (double kn : {2.0, 0.3}) {
    CHECK(beta_kn(make_benchmark_pair(grid24(), 0.0, kn), grid24()) == doctest::Approx(diam * 2.0 / kn).epsilon(1e-14));
  }
}

TEST_CASE("beta decreases with Kn") {
  double previous = INFINITY;
  for (double kn = 0.05; kn < 1.0; kn += 0.05) {
    const double b = beta_kn(make_benchmark_pair(grid24(), 0.025, kn), grid24());
    CHECK(b < previous);
    previous = b;
  }
}

TEST_CASE("absorption enters beta with a factor Kn") {
  const auto g = grid24();
  const auto a = make_medium(g, [](Vec2) { return 1.0; }, [](Vec2) { return 0.2; }, "a");
  const auto b = make_medium(g, [](Vec2) { return 1.5; }, [](Vec2) { return 0.4; }, "b");
  const double kn = 0.5;
  const MediaPair pair{ScaledMedium(a, kn), ScaledMedium(b, kn), 0.0};
  CHECK(beta_kn(pair, g) == doctest::Approx(g.diameter() * (kn * 0.6 + 2.5 / kn)).epsilon(1e-14));
}

TEST_CASE("zero contrast passes with zero lower bounds") {
  const auto grid = build_grid(8, 8, 8, {0.6, 0.6});
  const auto pair = make_benchmark_pair(grid.spatial(), 0.0, 1.0);
  const auto r = check_inequality(grid, pair, 0.1, serial());
  CHECK(r.pass);
  CHECK(r.max_lower_bound == 0.0);
  CHECK(r.rays.size() == grid.inflow().size());
  for (const auto& ray : r.rays) CHECK(ray.lower_bound == 0.0);
}

TEST_CASE("per-ray bound is the damped chord length outside the ball") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  const double z = 0.1, kn = 0.5;
  const auto pair = make_benchmark_pair(g, z, kn);
  // Placeholder operators: only the ray enumeration is under test here.
  const ScaledMedium vacuum(constant_medium(g, 0.0), kn);
  const auto a = assemble_ballistic(grid, vacuum);
  const auto r = check_inequality(grid, pair, a, a, 0.1);

  std::vector<double> outside(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) outside[c] = kBenchmarkBall.contains(g.center(c)) ? 0.0 : 1.0;
  double longest = 0.0;
  for (const auto& idx : grid.inflow()) {
    longest = std::max(longest, oracle::brute_force_xray(g, outside, grid.facets()[idx.facet].midpoint,
                                                         grid.angular().direction(idx.ordinate)));
  }
  const double beta = beta_kn(pair, g);
  CHECK(r.max_lower_bound == doctest::Approx(std::exp(-beta) * z / kn * longest).epsilon(1e-12));
  CHECK(r.diff_norm == 0.0);
  CHECK_FALSE(r.pass);
}

TEST_CASE("inequality holds for the benchmark pair on a coarse grid") {
  const auto grid = build_grid(12, 12, 16, {0.6, 0.6});
  for (double kn : {1.0, 0.25}) {
    const auto pair = make_benchmark_pair(grid.spatial(), 0.1, kn);
    const auto r = check_inequality(grid, pair, 0.1, serial());
    CHECK(r.pass);
    CHECK(r.diff_norm > 0.0);
    CHECK(r.worst_slack_ratio <= 1.1);
    CHECK(r.worst_slack_ratio == doctest::Approx(r.max_lower_bound / r.diff_norm));
  }
}

TEST_CASE("linear fits") {
  std::vector<double> xs{0.5, 1, 2, 4, 8};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::exp(-0.1 * x));
  auto fit = fit_loglinear(xs, ys);
  CHECK(fit.slope == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  fit = fit_loglinear(xs, std::vector<double>(5, 3.0));
  CHECK(fit.slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(fit.r2 == 1.0);

  fit = fit_linear(std::vector<double>{1, 2, 3, 4}, std::vector<double>{3, 5, 7, 9});
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));

  // y = x with one perturbed point: r2 from the residuals by hand.
  fit = fit_linear(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1.5, 2});
  CHECK(fit.slope == doctest::Approx(1.0));
  CHECK(fit.intercept == doctest::Approx(1.0 / 6.0));
  CHECK(fit.r2 == doctest::Approx(12.0 / 13.0).epsilon(1e-14));  // ss_res = 1/6, ss_tot = 13/6
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_loglinear(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 2}), NonPositiveData);
  CHECK_THROWS_AS(fit_loglinear(std::vector<double>{1, 2, 3}, std::vector<double>{1, -1, 2}), NonPositiveData);
  CHECK_THROWS_AS(fit_linear(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_linear(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_linear(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), std::invalid_argument);
}
