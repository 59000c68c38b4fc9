#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rte/media.hpp"
#include "rte/raytrace.hpp"

using namespace rte;

namespace {

const Vec2 kLo{0.0, 0.0};
const Vec2 kHi{0.6, 0.6};

Vec2 neg(Vec2 v) { return {-v.x, -v.y}; }

// Supersampled midpoint rule for a cellwise-constant field, independent of the
// cell walker: each sample point is located by floor division.
double supersampled_xray(const SpatialGrid& g, const std::vector<double>& cells, Vec2 x, Vec2 v, long n) {
  const double len = oracle::chord_to_boundary(x, v, kLo, kHi);
  const double h = len / static_cast<double>(n);
  double sum = 0.0;
  for (long k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    const int i = std::clamp(static_cast<int>(std::floor((x.x + t * v.x) / g.dx)), 0, g.nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((x.y + t * v.y) / g.dy)), 0, g.ny - 1);
    sum += cells[g.cell(i, j)];
  }
  return sum * h;
}

}  // namespace

TEST_CASE("travel time examples") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  const Vec2 v0 = grid.angular().direction(0);
  CHECK(travel_time(g, {0.0, 0.3}, v0) == doctest::Approx(0.6 / std::cos(std::numbers::pi / 24)).epsilon(1e-14));
  CHECK(travel_time(g, {0.0, 0.3}, v0) == doctest::Approx(0.60516).epsilon(1e-4));
  CHECK(travel_time(g, {0.6, 0.3}, v0) == 0.0);
  CHECK(travel_time(g, {0.0, 0.3}, v0, Direction::backward) == 0.0);
}

TEST_CASE("forward and backward travel times add up to the chord") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto pts = oracle::random_vector(40, 0.0, 0.6, 3);
  for (int j = 0; j < 24; ++j) {
    const Vec2 v = grid.angular().direction(j);
    const Vec2 c{0.3, 0.3};
    const double chord = oracle::chord_to_boundary(c, v, kLo, kHi) + oracle::chord_to_boundary(c, neg(v), kLo, kHi);
    CHECK(travel_time(grid.spatial(), c, v) + travel_time(grid.spatial(), c, v, Direction::backward) ==
          doctest::Approx(chord).epsilon(1e-13));
    for (std::size_t k = 0; k < pts.size(); k += 2) {
      const Vec2 p{pts[k], pts[k + 1]};
      CHECK(travel_time(grid.spatial(), p, v) == doctest::Approx(oracle::chord_to_boundary(p, v, kLo, kHi)).epsilon(1e-13));
      CHECK(travel_time(grid.spatial(), p, v, Direction::backward) ==
            doctest::Approx(oracle::chord_to_boundary(p, neg(v), kLo, kHi)).epsilon(1e-13));
    }
  }
}

TEST_CASE("inflow rays tile their chord with adjacent cells") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
    const Ray r = inflow_ray(grid, k);
    const double chord = oracle::chord_to_boundary(r.start, r.direction, kLo, kHi);
    REQUIRE(!r.segments.empty());
    CHECK(r.exit_time == doctest::Approx(chord).epsilon(1e-13));
    CHECK(r.segments.front().t0 == 0.0);
    CHECK(r.segments.back().t1 == doctest::Approx(r.exit_time).epsilon(1e-14));
    CHECK(r.segments.front().cell == grid.facets()[grid.inflow()[k].facet].cell);
    double total = 0.0;
    for (std::size_t s = 0; s < r.segments.size(); ++s) {
      const auto& seg = r.segments[s];
      CHECK(seg.length() > 0.0);
      total += seg.length();
      if (s > 0) {
        CHECK(seg.t0 == r.segments[s - 1].t1);
        const int di = std::abs(g.cell_i(seg.cell) - g.cell_i(r.segments[s - 1].cell));
        const int dj = std::abs(g.cell_j(seg.cell) - g.cell_j(r.segments[s - 1].cell));
        CHECK(di <= 1);
        CHECK(dj <= 1);
        CHECK(di + dj >= 1);
      }
    }
    CHECK(total == doctest::Approx(chord).epsilon(1e-12));
  }
}

TEST_CASE("exit facet contains the exit point") {
  const auto grid = build_grid(6, 6, 8, {0.6, 0.6});
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
    const auto& idx = grid.inflow()[k];
    const Vec2 v = grid.angular().direction(idx.ordinate);
    const auto e = exit_facet(grid, grid.facets()[idx.facet].midpoint, v);
    const auto& f = grid.facets()[e.facet];
    CHECK(dot(v, f.normal) > 0.0);
    CHECK(std::abs(e.point.x - f.midpoint.x) <= 0.5 * grid.spatial().dx + 1e-12);
    CHECK(std::abs(e.point.y - f.midpoint.y) <= 0.5 * grid.spatial().dy + 1e-12);
    CHECK(grid.outflow_index(e.facet, idx.ordinate) >= 0);
  }
}

TEST_CASE("ray through cell corners") {
  const auto grid = build_grid(4, 4, 4, {1.0, 1.0});
  const Vec2 v = grid.angular().direction(0);  // 45 degrees
  const Ray r = trace_ray(grid.spatial(), {0.0, 0.0}, v);
  REQUIRE(r.segments.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(r.segments[k].cell == grid.spatial().cell(k, k));
    CHECK(r.segments[k].length() == doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-13));
  }
  // Starting on an interior corner, the walk begins in the cell being entered.
  for (int j = 0; j < 4; ++j) {
    const Vec2 d = grid.angular().direction(j);
    const Ray s = trace_ray(grid.spatial(), {0.5, 0.5}, d);
    const int i0 = d.x > 0 ? 2 : 1;
    const int j0 = d.y > 0 ? 2 : 1;
    CHECK(s.segments.front().cell == grid.spatial().cell(i0, j0));
    CHECK(s.exit_time == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-13));
  }
}

TEST_CASE("x-ray transform examples") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  const Vec2 v0 = grid.angular().direction(0);
  const std::vector<double> ones(g.num_cells(), 1.0);
  const std::vector<double> zeros(g.num_cells(), 0.0);
  CHECK(xray_transform(g, ones, {0.0, 0.3}, v0) == doctest::Approx(0.6 / std::cos(std::numbers::pi / 24)).epsilon(1e-13));
  CHECK(xray_transform(g, zeros, {0.0, 0.3}, v0) == 0.0);
  const ScalarFunction ball = [](Vec2 p) { return std::hypot(p.x - 0.3, p.y - 0.3) < 0.2 ? 1.0 : 0.0; };
  for (int j = 0; j < 24; ++j) {
    const double step = g.dx / 4;
    CHECK(std::abs(xray_transform(g, ball, {0.3, 0.3}, grid.angular().direction(j), step) - 0.4) <= 2 * step);
  }
  const ScalarFunction one = [](Vec2) { return 1.0; };
  CHECK(xray_transform(g, one, {0.0, 0.3}, v0, g.dx / 4) == doctest::Approx(0.60516).epsilon(1e-4));
}

TEST_CASE("x-ray transform of a cellwise field is exact") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  const auto field = oracle::random_vector(g.num_cells(), 0.0, 1.0, 11);
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); ++k) {
    const auto& idx = grid.inflow()[k];
    const Vec2 x = grid.facets()[idx.facet].midpoint;
    const Vec2 v = grid.angular().direction(idx.ordinate);
    CHECK(xray_transform(g, field, x, v) == doctest::Approx(oracle::brute_force_xray(g, field, x, v)).epsilon(1e-12));
  }
  // Dense supersampling on two long rays.
  for (int k : {5, 700}) {
    const auto& idx = grid.inflow()[k];
    const Vec2 x = grid.facets()[idx.facet].midpoint;
    const Vec2 v = grid.angular().direction(idx.ordinate);
    CHECK(std::abs(xray_transform(g, field, x, v) - supersampled_xray(g, field, x, v, 20'000'000)) <= 1e-6);
  }
}

TEST_CASE("x-ray transform is linear and reversible") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  const auto f = oracle::random_vector(g.num_cells(), -1.0, 1.0, 5);
  const auto h = oracle::random_vector(g.num_cells(), 0.0, 2.0, 6);
  std::vector<double> mix(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) mix[c] = 0.7 * f[c] - 2.5 * h[c];
  for (int k = 0; k < static_cast<int>(grid.inflow().size()); k += 3) {
    const auto& idx = grid.inflow()[k];
    const Vec2 x = grid.facets()[idx.facet].midpoint;
    const Vec2 v = grid.angular().direction(idx.ordinate);
    const double xf = xray_transform(g, f, x, v);
    const double xh = xray_transform(g, h, x, v);
    CHECK(std::abs(xray_transform(g, mix, x, v) - (0.7 * xf - 2.5 * xh)) <= 1e-13);
    const Ray r = trace_ray(g, x, v);
    CHECK(xray_transform(g, f, r.end(), neg(v)) == doctest::Approx(xf).epsilon(1e-12));
  }
}

TEST_CASE("x-ray sup norm by enumeration") {
  const auto grid = build_grid(24, 24, 24, {0.6, 0.6});
  const auto& g = grid.spatial();
  double max_chord = 0.0;
  for (const auto& idx : grid.inflow()) {
    max_chord = std::max(max_chord, oracle::chord_to_boundary(grid.facets()[idx.facet].midpoint,
                                                             grid.angular().direction(idx.ordinate), kLo, kHi));
  }
  CHECK(xray_sup_norm(grid, std::vector<double>(g.num_cells(), 1.0)) == doctest::Approx(max_chord).epsilon(1e-13));
  CHECK(xray_sup_norm(grid, std::vector<double>(g.num_cells(), 0.0)) == 0.0);

  const auto pair = make_benchmark_pair(g, 0.1, 1.0);
  std::vector<double> outside(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    outside[c] = pair.perturbed.base().sigma_s.at(c) - pair.reference.base().sigma_s.at(c);
  }
  const double s = xray_sup_norm(grid, outside);
  CHECK(s <= 0.1 * max_chord + 1e-12);
  CHECK(s >= 0.1 * (max_chord - 0.4));
}
