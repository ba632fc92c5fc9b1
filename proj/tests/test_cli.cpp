#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fokker/action.hpp"
#include "fokker/errors.hpp"
#include "fokker/experiments.hpp"

using namespace fokker;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is, fs::temp_directory_path(), "inline");
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("fokker_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto sc = parse(R"(
[run]
experiment = action-eval
nodes = 17
seed = 9
hbar = 0.5

[particle1]
mass = 2
charge = 0.3
switching = pulse
s_on = 1
s_off = 5
ramp = 0.5
start = 0 1 0 0
end = 4 1 1 0

[particle2]
worldline = circular
radius = 2
speed = 0.4
duration = 6
frozen = true

[params]
levels = 4
p1 = 1 2 3 4
)");
  CHECK(sc.name == "inline");
  CHECK(sc.nodes == 17);
  CHECK(sc.seed == 9);
  CHECK(sc.hbar == 0.5);
  CHECK(sc.particle1.mass == 2.0);
  CHECK(sc.particle1.profile.e_max == 0.3);
  CHECK(sc.particle1.profile.s_off == 5.0);
  CHECK(sc.particle1.end == FourVector{4, 1, 1, 0});
  CHECK(sc.particle2.shape == Shape::circular);
  CHECK(sc.particle2.frozen);
  CHECK(sc.particle2.profile.switched_off());
  CHECK(sc.param("levels", 3) == 4);
  CHECK(sc.param("missing", 2.5) == 2.5);
  CHECK(sc.param_vector("p1", {}) == FourVector{1, 2, 3, 4});
  CHECK_THROWS_AS(sc.param("p1", 0.0), ConfigError);
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_AS(parse("[run]\nnodes = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\nnodes = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\nnodez = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\n[particle3]\nmass = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\n[particle1]\nmass = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\n[particle1]\nstart = 0 0 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\n[particle1]\nworldline = helix\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\n[particle1]\nworldline = file\nfile = nope.dat\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("[run]\nexperiment = action-eval\ntol_grad = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run\nexperiment = action-eval\n"), ConfigError);
  CHECK_THROWS_AS(validate_scenario(parse("[run]\nexperiment = nothing\n")), ConfigError);
}

TEST_CASE("worldline shapes are in proper-time gauge") {
  auto sc = parse(R"(
[run]
experiment = action-eval
nodes = 33
[particle1]
mass = 1.5
worldline = circular
radius = 2
speed = 0.4
duration = 6
warp = 0.3
[particle2]
start = 0 0 0 0
end = 5 1 0 0
warp = -0.2
)");
  for (const auto* p : {&sc.particle1, &sc.particle2}) {
    const auto w = build_worldline(*p, 33);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const FourVector v = velocity(w, k);
      CHECK(std::sqrt(dot(v, v)) / w.lapse_at(k) == doctest::Approx(p->mass).epsilon(5e-3));
    }
  }
  const auto w = build_worldline(sc.particle1, 33);
  CHECK(w.point(32)[0] == doctest::Approx(6.0));
  CHECK(std::hypot(w.point(20)[1], w.point(20)[2]) == doctest::Approx(2.0));
  // Worldline tables load back through worldline = file.
  const auto dir = scratch("file");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "w.dat");
    write_worldline_table(os, w);
  }
  std::istringstream is("[run]\nexperiment = action-eval\n[particle1]\nmass = 1.5\nworldline = file\nfile = w.dat\n");
  const auto sf = parse_scenario(is, dir, "f");
  const auto back = build_worldline(sf.particle1, 5);
  CHECK(back.size() == 33);
  CHECK(back.point(20) == w.point(20));
}

TEST_CASE("action-eval of free particles gives m T") {
  const auto dir = scratch("free");
  auto sc = parse("[run]\nexperiment = action-eval\nnodes = 9\n[particle1]\nmass = 1.3\nend = 7 0 0 0\n"
                  "[particle2]\nend = 2 0 0 0\n");
  RunOptions o;
  o.out = dir;
  const auto r = run_experiment(sc, o);
  CHECK(r.status == "ok");
  CHECK(r.metric == doctest::Approx(1.3 * 7 + 2.0).epsilon(1e-14));
  const auto csv = slurp(dir / "inline" / "action.csv");
  CHECK(csv.rfind(action_csv_header() + "\n", 0) == 0);
  CHECK(summary_line(r).rfind("inline,action-eval,ok,total,", 0) == 0);
}

TEST_CASE("charges-off perturbation-order has vanishing first order") {
  const auto dir = scratch("pert");
  auto sc = parse(R"(
[run]
experiment = perturbation-order
nodes = 17
[particle1]
end = 4 0.5 0 0
[particle2]
start = 0 2 0 0
end = 4 2 0.5 0
)");
  RunOptions o;
  o.out = dir;
  const auto r = run_experiment(sc, o);
  CHECK(r.metric_name == "max_first_order");
  CHECK(r.metric == 0.0);
  std::istringstream rows(slurp(dir / "inline" / "perturbation.csv"));
  std::string line;
  std::getline(rows, line);
  int n = 0;
  while (std::getline(rows, line)) {
    ++n;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    CHECK(line.substr(c2 + 1, c3 - c2 - 1) == "0");
  }
  CHECK(n == 3);
}

TEST_CASE("numerical failures are reported with a status") {
  const auto dir = scratch("fail");
  auto sc = parse(R"(
[run]
experiment = proper-time-fix
nodes = 129
[particle1]
charge = 0.1
end = 10 0 0 0
[particle2]
charge = 0.2
start = -5 2 0 0
end = 15 2 0 0
[params]
eps1_amp = 0.05
eps1_lo = 0.2
eps1_hi = 0.6
window1 = 0 4
)");
  RunOptions o;
  o.out = dir;
  const auto r = run_experiment(sc, o);
  CHECK(r.numerical_failure);
  CHECK(r.status == "no-shell-return");
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("reruns are byte-identical and the seed matters") {
  auto sc = parse("[run]\nexperiment = free-propagator\n[params]\nsamples = 4\nsteps = 1 8\n");
  RunOptions a, b, c;
  a.out = scratch("det_a");
  b.out = scratch("det_b");
  b.jobs = 3;
  c.out = scratch("det_c");
  c.seed = 99;
  run_experiment(sc, a);
  run_experiment(sc, b);
  run_experiment(sc, c);
  const auto fa = slurp(*a.out / "inline" / "free_propagator.csv");
  CHECK(fa == slurp(*b.out / "inline" / "free_propagator.csv"));
  CHECK(fa != slurp(*c.out / "inline" / "free_propagator.csv"));
}
