#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "fokker/errors.hpp"
#include "fokker/lightcone.hpp"

using namespace fokker;

TEST_CASE("static partner: two roots at x0 = +-r with weight 1/(2 r T)") {
  const double T = 10.0, r = 1.0;
  const auto partner = Worldline::straight({-T / 2, 0, 0, 0}, {T / 2, 0, 0, 0}, 101, 1.0,
                                           SwitchingProfile::always_on(1.0));
  const auto roots = find_crossings({0, r, 0, 0}, partner);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].tau_root == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(roots[1].tau_root == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(roots[0].kind == CrossingKind::retarded);
  CHECK(roots[1].kind == CrossingKind::advanced);
  for (const auto& c : roots) CHECK(c.weight == doctest::Approx(1.0 / (2 * r * T)).epsilon(1e-12));
  // Time-reflection symmetric configuration: equal weights.
  CHECK(roots[0].weight == doctest::Approx(roots[1].weight).epsilon(1e-13));
}

TEST_CASE("spacelike-separated short segment has no crossings") {
  const auto partner = Worldline::straight({0, 5, 0, 0}, {1, 5, 0, 0}, 17, 1.0, SwitchingProfile::always_on(1.0));
  CHECK(find_crossings({0, 0, 0, 0}, partner).empty());
}

TEST_CASE("roots hidden inside one cell are found") {
  // Coarse grid: both crossings lie in the single middle cell.
  const auto partner = Worldline::straight({-10, 0, 0, 0}, {10, 0, 0, 0}, 3, 1.0, SwitchingProfile::always_on(1.0));
  const auto roots = find_crossings({0.5, 1, 0, 0}, partner);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].tau_root * 20 - 10 == doctest::Approx(-0.5));
  CHECK(roots[1].tau_root * 20 - 10 == doctest::Approx(1.5));
}

TEST_CASE("grazing contact is reported") {
  // s^2(tau) = delta - sigma^2 along a spacelike partner: roots at +-sqrt(delta)
  // with vanishing slope.
  std::vector<FourVector> pts;
  for (int k = 0; k <= 20; ++k) pts.push_back({1e-9, 0, -1.0 + k / 10.0, 0});
  const Worldline partner(pts, std::vector<double>(21, 1.0), 1.0, SwitchingProfile::always_on(1.0));
  CHECK_THROWS_AS(find_crossings({0, 0, 0, 0}, partner), GrazingRoot);
}

TEST_CASE("lightcone_sum static limit e2 / r per unit time") {
  const double r = 2.0, e2 = 0.7;
  const auto partner = fixtures::static_line(0.0, -20, 20, 257, 1.0, SwitchingProfile::always_on(e2));
  const FourVector u{1, 0, 0, 0};
  for (double t : {-5.0, 0.0, 3.3, 10.0})
    CHECK(lightcone_sum({t, r, 0, 0}, u, partner) == doctest::Approx(e2 / r).epsilon(1e-12));
  const FourVector vec = lightcone_vector_sum({0, r, 0, 0}, partner);
  CHECK(vec[0] == doctest::Approx(40.0 * e2 / (40.0 * r)).epsilon(1e-12));
  CHECK(std::abs(vec[1]) < 1e-14);
}

TEST_CASE("lightcone_sum trivial cases") {
  const auto off = fixtures::static_line(0.0, -20, 20, 65, 1.0, SwitchingProfile::off());
  CHECK(lightcone_sum({0, 1, 0, 0}, {1, 0, 0, 0}, off) == 0.0);
  const auto on = fixtures::static_line(0.0, -20, 20, 65, 1.0, SwitchingProfile::always_on(1.0));
  CHECK(lightcone_sum({0, 1, 0, 0}, {1, 0, 0, 0}, on, TauWindow{0.0, 1.0}) == 0.0);
  // Charge switched on only far from both roots.
  const auto pulse = fixtures::static_line(0.0, -20, 20, 65, 1.0, SwitchingProfile::pulse(1.0, 30.0, 38.0, 1.0));
  CHECK(lightcone_sum({0, 1, 0, 0}, {1, 0, 0, 0}, pulse) == 0.0);
}

TEST_CASE("scalar lightcone sum is symmetric for mirrored particles") {
  const auto a = fixtures::static_line(0.0, -20, 20, 129, 1.0, SwitchingProfile::always_on(0.5));
  const auto b = fixtures::static_line(3.0, -20, 20, 129, 1.0, SwitchingProfile::always_on(0.5));
  const double ab = lightcone_sum(a.position(0.5), a.cell_slope(64), b);
  const double ba = lightcone_sum(b.position(0.5), b.cell_slope(64), a);
  CHECK(std::abs(ab - ba) <= 1e-10 * std::abs(ab));
}

TEST_CASE("straight timelike worldlines give exactly two crossings") {
  const auto partner = Worldline::straight({-50, 0, 0, 0}, {50, 3, 1, 0}, 200, 1.0, SwitchingProfile::always_on(1.0));
  const auto other = Worldline::straight({-10, 4, 0, 1}, {10, 2, 2, 0}, 50, 1.0, SwitchingProfile::always_on(1.0));
  for (std::size_t k = 0; k < other.size(); ++k) {
    const auto roots = find_crossings(other.point(k), partner);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].kind == CrossingKind::retarded);
    CHECK(roots[1].kind == CrossingKind::advanced);
  }
}
