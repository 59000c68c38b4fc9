#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rte/harness.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "rte_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(RTELAB_PATH) + " " + args + " > " + (kOut / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Scratch {
  Scratch() {
    fs::remove_all(kOut);
    fs::create_directories(kOut);
  }
  ~Scratch() { fs::remove_all(kOut); }
};

const std::string kSmall = " --nx 6 --ny 6 --ntheta 8 --out " + kOut.string();

}  // namespace

TEST_CASE("usage errors exit with 1") {
  Scratch s;
  CHECK(run("") == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("solve --nx 6 --ny 6 --ntheta 6 --out " + kOut.string()) == 1);
  CHECK(run("solve --nx 6 --ny 6 --ntheta 4 --inflow facet:0,1 --out " + kOut.string()) == 1);
  CHECK(run("albedo-norm --which everything" + kSmall) == 1);
  CHECK(run("solve --medium-file /no/such/file" + kSmall) == 1);
}

TEST_CASE("solve writes the angular average and the outflow trace") {
  Scratch s;
  REQUIRE(run("solve --inflow constant:2 --kn 0.5" + kSmall) == 0);
  const auto avg = rte::parse_csv(read(kOut / "solve_average.csv"));
  CHECK(avg.columns == std::vector<std::string>{"x", "y", "value"});
  CHECK(avg.rows.size() == 36);
  for (std::size_t r = 0; r < avg.rows.size(); ++r) CHECK(avg.number(r, "value") == doctest::Approx(2.0).epsilon(1e-12));
  const auto trace = rte::parse_csv(read(kOut / "solve_trace.csv"));
  CHECK(trace.columns == std::vector<std::string>{"side", "cell", "ordinate", "weight", "value"});
  CHECK(trace.rows.size() == 24 * 4);
  CHECK(read(kOut / "stdout.txt").find("iterations=") != std::string::npos);

  std::ofstream(kOut / "ball.txt") << "background = 1.1\nball_center_x = 0.3\nball_center_y = 0.3\nball_radius = 0.2\n";
  CHECK(run("solve --inflow facet:0,0 --medium-file " + (kOut / "ball.txt").string() + kSmall) == 0);
}

TEST_CASE("albedo norms and matrix dump") {
  Scratch s;
  REQUIRE(run("albedo-norm --which ballistic --kn 1 --dump " + (kOut / "a1.csv").string() + kSmall) == 0);
  const auto t = rte::parse_csv(read(kOut / "albedo-norm.csv"));
  CHECK(t.columns == std::vector<std::string>{"kn", "z", "which", "norm", "iterations_max", "residual_max"});
  CHECK(t.cell(0, "which") == "ballistic");
  CHECK(t.number(0, "norm") > 0.0);
  CHECK(t.number(0, "norm") < 1.0);
  const auto dump = rte::parse_csv(read(kOut / "a1.csv"));
  CHECK(dump.columns == std::vector<std::string>{"out_index", "in_index", "entry"});
  CHECK(dump.rows.size() == 6 * 4 * 4);  // one exit per inflow index

  REQUIRE(run("albedo-norm --which full --kn 1 --medium reference" + kSmall) == 0);
  CHECK(rte::parse_csv(read(kOut / "albedo-norm.csv")).number(0, "norm") == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(run("albedo-norm --which diff --kn 1 --z 0.1 --medium benchmark-pair" + kSmall) == 0);
  CHECK(rte::parse_csv(read(kOut / "albedo-norm.csv")).number(0, "norm") > 0.0);
}

TEST_CASE("experiments write their CSV and plot") {
  Scratch s;
  REQUIRE(run("lipschitz --z-list 0.1,0.05,0.025 --plot" + kSmall) == 0);
  const auto csv = read(kOut / "lipschitz.csv");
  CHECK(csv.rfind("# experiment=lipschitz grid=6x6x8", 0) == 0);
  CHECK(read(kOut / "stdout.txt") == csv);
  CHECK(fs::exists(kOut / "lipschitz.svg"));
  REQUIRE(run("diffusion-limit --inflow constant:1" + kSmall) == 0);
  CHECK(fs::exists(kOut / "diffusion-limit.csv"));
  REQUIRE(run("ballistic-decay --kn-list 2,1,0.5" + kSmall) == 0);
  const auto first = read(kOut / "ballistic-decay.csv");
  REQUIRE(run("ballistic-decay --kn-list 2,1,0.5" + kSmall) == 0);
  CHECK(read(kOut / "ballistic-decay.csv") == first);
}

TEST_CASE("non-converged sweeps exit with 2 and keep partial rows") {
  Scratch s;
  CHECK(run("kn-blowup --kn-list 2,1,0.5 --max-iters 1" + kSmall) == 2);
  const auto t = rte::parse_csv(read(kOut / "kn-blowup.csv"));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.cell(0, "status") == "nonconverged");
  CHECK(run("solve --kn 0.1 --max-iters 2 --inflow facet:0,0" + kSmall) == 2);
}

TEST_CASE("worker count does not change the output") {
  Scratch s;
  auto with_workers = [](int n) {
    const std::string cmd = "RTE_WORKERS=" + std::to_string(n) + " " + RTELAB_PATH +
                            " lipschitz --z-list 0.1,0.05,0.025" + kSmall + " > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    return read(kOut / "lipschitz.csv");
  };
  const auto one = with_workers(1);
  CHECK(with_workers(3) == one);
  CHECK(with_workers(1) == one);
}
