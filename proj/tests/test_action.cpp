#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "fokker/action.hpp"

using namespace fokker;

TEST_CASE("free straight line at the stationary lapse gives m T") {
  const double m = 1.7, T = 6.0;
  const auto w = Worldline::straight({0, 0, 0, 0}, {T, 0, 0, 0}, 33, m, SwitchingProfile::off());
  const auto other = Worldline::straight({0, 5, 0, 0}, {T, 5, 0, 0}, 33, 1.0, SwitchingProfile::off());
  const auto a = fokker_action(w, other);
  CHECK(a.kinetic_1 == doctest::Approx(m * T).epsilon(1e-14));
  CHECK(a.interaction() == 0.0);
  CHECK(a.total == doctest::Approx(a.kinetic_1 + a.kinetic_2 + a.interaction_cross +
                                   a.interaction_self_1 + a.interaction_self_2 + a.modification)
                       .epsilon(1e-12));
}

TEST_CASE("static charges: cross term e1 e2 T / r") {
  const double r = 2.0, e1 = 0.3, e2 = -0.4, T = 10.0;
  // Partner extends far enough that every point of particle 1 sees both roots.
  const auto w1 = fixtures::static_line(0.0, 0.0, T, 65, 1.0, SwitchingProfile::always_on(e1));
  const auto w2 = fixtures::static_line(r, -5.0, T + 5.0, 97, 1.0, SwitchingProfile::always_on(e2));
  const double outer = interaction_outer_sum(w1, w2, false);
  CHECK(outer == doctest::Approx(e1 * e2 * T / r).epsilon(1e-12));
  // Timelike worldlines have no self crossings outside the cut.
  const auto a = fokker_action(w1, w2);
  CHECK(a.interaction_self_1 == 0.0);
  CHECK(a.interaction_self_2 == 0.0);
}

TEST_CASE("fokker_action is symmetric under relabeling") {
  const auto w1 = fixtures::wiggly(0.0, 0.2, 0.3, 5.0, 65, 1.0, SwitchingProfile::pulse(0.4, 0.5, 4.0, 1.0));
  const auto w2 = fixtures::wiggly(2.0, 1.1, 0.2, 5.0, 49, 1.5, SwitchingProfile::pulse(-0.3, 1.0, 3.0, 0.5));
  const auto a = fokker_action(w1, w2);
  const auto b = fokker_action(w2, w1);
  CHECK(std::abs(a.total - b.total) <= 1e-10 * std::abs(a.total));
  CHECK(a.interaction_cross != 0.0);
}

TEST_CASE("charges off: interaction vanishes, modification is kinetic only") {
  std::mt19937_64 rng(11);
  const auto w1 = fixtures::wiggly(0.0, 0.2, 0.3, 5.0, 65, 1.0, SwitchingProfile::off());
  const auto w2 = fixtures::wiggly(2.0, 1.1, 0.2, 5.0, 65, 1.0, SwitchingProfile::off());
  const auto e1 = fixtures::random_shift(rng, 65, 0.1);
  const auto e2 = fixtures::random_shift(rng, 65, 0.1);
  const auto a = modified_action(w1, w2, e1, e2);
  CHECK(a.interaction() == 0.0);

  double expected = 0.0;
  for (const auto* pair : {&w1, &w2}) {
    const auto& w = *pair;
    const auto& e = pair == &w1 ? e1 : e2;
    const auto d = e.tau_derivative(w.step());
    for (std::size_t c = 0; c < w.cells(); ++c) {
      const auto v = w.cell_slope(c);
      const double n = w.cell_lapse(c);
      expected += w.step() * 0.5 * dot(v, v) / (n * n) * 0.5 * (d[c] + d[c + 1]);
    }
  }
  CHECK(a.modification == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("modified_action with zero shifts equals fokker_action") {
  const auto w1 = fixtures::wiggly(0.0, 0.2, 0.3, 5.0, 65, 1.0, SwitchingProfile::pulse(0.4, 0.5, 4.0, 1.0));
  const auto w2 = fixtures::wiggly(2.0, 1.1, 0.2, 5.0, 65, 1.0, SwitchingProfile::pulse(-0.3, 1.0, 3.0, 0.5));
  const auto a = fokker_action(w1, w2);
  const auto b = modified_action(w1, w2, ShiftField::zero(65), ShiftField::zero(65));
  CHECK(b.modification == 0.0);
  CHECK(b.total == a.total);
}

TEST_CASE("w_functional: static value, relabeling, charges off") {
  const double r = 2.0, e2 = 0.5;
  const auto w1 = fixtures::static_line(0.0, 0.0, 10.0, 65, 1.0, SwitchingProfile::always_on(0.3));
  const auto w2 = fixtures::static_line(r, -5.0, 15.0, 97, 1.0, SwitchingProfile::always_on(e2));
  // Velocity dx/dtau = (10,0,0,0): W1 = e2 * 10 / r.
  CHECK(w_functional(w1, w2, 0.5, Particle::first) == doctest::Approx(10.0 * e2 / r).epsilon(1e-12));
  CHECK(w_functional(w1, w2, 0.3, Particle::first) == doctest::Approx(w_functional(w2, w1, 0.3, Particle::second)));
  const auto off = w2.with_profile(SwitchingProfile::off());
  CHECK(w_functional(w1, off, 0.5, Particle::first) == 0.0);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const auto w1 = fixtures::wiggly(0.0, 0.2, 0.3, 5.0, 129, 1.0, SwitchingProfile::pulse(0.4, 0.5, 4.0, 1.0));
  const auto w2 = fixtures::wiggly(2.0, 1.1, 0.2, 5.0, 97, 1.0, SwitchingProfile::pulse(-0.3, 1.0, 3.0, 0.5));
  ActionOptions serial;
  serial.exec = Execution::serial;
  ActionOptions parallel;
  parallel.exec = Execution::parallel;
  std::mt19937_64 rng(5);
  const auto e1 = fixtures::random_shift(rng, 129, 0.05);
  const auto e2 = fixtures::random_shift(rng, 97, 0.05);
  const auto a = modified_action(w1, w2, e1, e2, serial);
  const auto b = modified_action(w1, w2, e1, e2, parallel);
  CHECK(a.total == b.total);
  CHECK(a.modification == b.modification);
}

TEST_CASE("csv row has one field per column") {
  ActionBreakdown a;
  a.kinetic_1 = 1.5;
  a.total = 1.5;
  const auto header = action_csv_header();
  const auto row = action_csv_row(a);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("1.5,", 0) == 0);
}
