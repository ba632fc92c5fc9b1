#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "fokker/errors.hpp"
#include "fokker/worldline.hpp"

using namespace fokker;

namespace {

Worldline with_lapse_fn(std::size_t nodes, double (*n)(double)) {
  std::vector<FourVector> pts(nodes);
  std::vector<double> lapse(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    pts[k] = {t, 0, 0, 0};
    lapse[k] = n(t);
  }
  return Worldline(pts, lapse, 1.0, SwitchingProfile::off());
}

}  // namespace

TEST_CASE("proper_time examples") {
  const auto w2 = with_lapse_fn(17, [](double) { return 2.0; });
  CHECK(proper_time(w2, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(proper_time(w2, 0.0) == 0.0);

  // N = 1 + tau integrates to tau + tau^2/2; exact for a linear lapse.
  const auto lin = with_lapse_fn(9, [](double t) { return 1.0 + t; });
  CHECK(proper_time(lin, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(proper_time(lin, 0.3) == doctest::Approx(0.3 + 0.045).epsilon(1e-14));

  CHECK_THROWS_AS(proper_time(lin, 1.5), DomainError);
  CHECK_THROWS_AS(proper_time(lin, -0.1), DomainError);
}

TEST_CASE("proper_time is additive and positive") {
  const auto w = with_lapse_fn(33, [](double t) { return 1.0 + 0.5 * std::sin(7 * t); });
  CHECK(proper_time(w, 1.0) > 0.0);
  for (double a : {0.1, 0.37, 0.5}) {
    for (double b : {0.61, 0.8, 0.999}) {
      // segment(a, b) is the proper time integral of the interpolated lapse
      // over [a, b], computed here from the same interpolant in one piece.
      const double seg = proper_time(w, b) - proper_time(w, a);
      double manual = 0.0;
      const int m = 20000;
      for (int i = 0; i < m; ++i) {
        const double t = a + (b - a) * (i + 0.5) / m;
        manual += w.lapse_at(w.locate(t)) * (b - a) / m;
      }
      CHECK(seg == doctest::Approx(manual).epsilon(1e-8));
      CHECK(proper_time(w, a) + seg == doctest::Approx(proper_time(w, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("velocity examples") {
  const auto line = Worldline::straight({0, 0, 0, 0}, {5, 0, 0, 0}, 11, 1.0, SwitchingProfile::off());
  for (std::size_t k = 0; k < line.size(); ++k) CHECK(velocity(line, k)[0] == doctest::Approx(5.0));

  // x0 = tau^2: central differences are exact for quadratics.
  std::vector<FourVector> pts;
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    pts.push_back({t * t + 1.0, 0, 0, 0});
  }
  const Worldline quad(pts, std::vector<double>(11, 1.0), 1.0, SwitchingProfile::off());
  CHECK(velocity(quad, 5)[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(velocity(quad, 0)[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  CHECK(velocity(quad, 10)[0] == doctest::Approx(2.0).epsilon(1e-13));

  // Circular spatial motion: second-order convergence against the analytic
  // derivative.
  auto circle_err = [](std::size_t nodes) {
    const double pi = std::numbers::pi;
    auto w = fixtures::sample(
        [&](double t) { return FourVector{8 * t, std::cos(2 * pi * t), std::sin(2 * pi * t), 0}; },
        [&](double t) {
          return FourVector{8, -2 * pi * std::sin(2 * pi * t), 2 * pi * std::cos(2 * pi * t), 0};
        },
        nodes, 1.0, SwitchingProfile::off());
    double err = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      const double t = w.tau(k);
      const FourVector exact{8, -2 * pi * std::sin(2 * pi * t), 2 * pi * std::cos(2 * pi * t), 0};
      err = std::max(err, component_norm(velocity(w, k) - exact));
    }
    return err;
  };
  const double e1 = circle_err(65), e2 = circle_err(129);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("switching profile values and analytic rate") {
  const auto p = SwitchingProfile::pulse(2.0, 1.0, 5.0, 1.0);
  CHECK(p.charge(0.5) == 0.0);
  CHECK(p.charge(1.0) == 0.0);
  CHECK(p.charge(3.0) == 2.0);
  CHECK(p.charge(5.0) == 0.0);
  CHECK(p.charge(1.5) == doctest::Approx(1.0));
  CHECK(p.rate(3.0) == 0.0);
  CHECK(p.rate(1.5) == doctest::Approx(2.0 * 1.5));
  CHECK(p.rate(4.5) == doctest::Approx(-2.0 * 1.5));

  // Continuous at the joins (C1).
  for (double s : {1.0, 2.0, 4.0, 5.0}) {
    CHECK(std::abs(p.charge(s + 1e-9) - p.charge(s - 1e-9)) < 1e-8);
    CHECK(std::abs(p.rate(s + 1e-9) - p.rate(s - 1e-9)) < 1e-7);
  }

  // Numeric derivative converges to the analytic one at O(h^2) away from
  // the joins, where the second derivative jumps.
  auto max_err = [&](double h) {
    double e = 0.0;
    for (double s = 0.03; s <= 6.0; s += 0.05)
      e = std::max(e, std::abs((p.charge(s + h) - p.charge(s - h)) / (2 * h) - p.rate(s)));
    return e;
  };
  const double e1 = max_err(1e-2), e2 = max_err(5e-3);
  CHECK(e2 < e1);
  CHECK(std::log2(e1 / e2) > 1.8);

  CHECK_THROWS_AS(SwitchingProfile::pulse(1.0, 2.0, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(SwitchingProfile::pulse(1.0, 0.0, 1.0, 0.6), ConfigError);
  CHECK(SwitchingProfile::always_on(0.3).charge(-1e9) == 0.3);
  CHECK(SwitchingProfile::always_on(0.3).rate(1e9) == 0.0);
}

TEST_CASE("shift field endpoints are pinned") {
  CHECK_THROWS_AS(ShiftField({0.1, 0.2, 0.0}), ConfigError);
  CHECK_THROWS_AS(ShiftField({0.0, 0.2, 0.3}), ConfigError);
  const ShiftField ok({0.0, 0.2, 1e-17});
  CHECK(ok[2] == 0.0);
}

TEST_CASE("reparametrize: identity, analytic lapse shift, proper time") {
  const std::size_t n = 129;
  const auto w = fixtures::wiggly(0.0, 0.3, 0.2, 4.0, n, 1.0, SwitchingProfile::off());

  const auto same = reparametrize(w, ShiftField::zero(n));
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(component_norm(same.point(k) - w.point(k)) < 1e-14);
    CHECK(same.lapse_at(k) == w.lapse_at(k));
  }

  // N = 1, eps = a sin(pi tau): N -> 1 - a pi cos(pi tau).
  const double a = 0.01, pi = std::numbers::pi;
  std::vector<FourVector> pts(n);
  std::vector<double> eps(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = w.tau(k);
    pts[k] = {t, 0, 0, 0};
    eps[k] = a * std::sin(pi * t);
  }
  const Worldline unit(pts, std::vector<double>(n, 1.0), 1.0, SwitchingProfile::off());
  const auto shifted = reparametrize(unit, ShiftField(eps));
  for (std::size_t k = 1; k + 1 < n; ++k)
    CHECK(shifted.lapse_at(k) == doctest::Approx(1.0 - a * pi * std::cos(pi * unit.tau(k))).epsilon(1e-4));

  // Total proper time is unchanged (the discrete derivative telescopes).
  std::mt19937_64 rng(3);
  for (double amp : {0.1, 0.05, 0.025}) {
    const auto e = fixtures::random_shift(rng, n, amp);
    const auto r = reparametrize(w, e);
    CHECK(std::abs(r.total_proper_time() - w.total_proper_time()) <= 1e-12 * w.total_proper_time());
    // Inverse shift restores the lapse.
    const auto back = reparametrize(r, -e);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(back.lapse_at(k) - w.lapse_at(k)) < 10 * amp * amp + 1e-13);
  }
}

TEST_CASE("reparametrize rejects fold-over") {
  const auto w = Worldline::straight({0, 0, 0, 0}, {1, 0, 0, 0}, 33, 1.0, SwitchingProfile::off());
  std::vector<double> eps(33);
  for (std::size_t k = 0; k < 33; ++k) eps[k] = 0.5 * std::sin(std::numbers::pi * w.tau(k));
  CHECK_THROWS_AS(reparametrize(w, ShiftField(eps)), FoldOver);
}

TEST_CASE("worldline table round trip and validation") {
  const auto w = fixtures::wiggly(1.0, 0.0, 0.1, 3.0, 9, 2.0, SwitchingProfile::always_on(0.1));
  std::stringstream ss;
  write_worldline_table(ss, w);
  const auto r = read_worldline_table(ss, 2.0, SwitchingProfile::always_on(0.1));
  REQUIRE(r.size() == w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(r.point(k) == w.point(k));
    CHECK(r.lapse_at(k) == w.lapse_at(k));
  }
  std::stringstream bad("0 0 0 0 0 1\n0.5 1 0 0 0\n");
  CHECK_THROWS_AS(read_worldline_table(bad, 1.0, SwitchingProfile::off()), ConfigError);
  std::stringstream skewed("0 0 0 0 0 1\n0.4 1 0 0 0 1\n1 2 0 0 0 1\n");
  CHECK_THROWS_AS(read_worldline_table(skewed, 1.0, SwitchingProfile::off()), ConfigError);
}

TEST_CASE("worldline invariants are enforced") {
  std::vector<FourVector> pts{{0, 0, 0, 0}, {1, 0, 0, 0}, {2, 0, 0, 0}};
  CHECK_THROWS_AS(Worldline(pts, {1, 0, 1}, 1.0, SwitchingProfile::off()), ConfigError);
  CHECK_THROWS_AS(Worldline(pts, {1, 1}, 1.0, SwitchingProfile::off()), ConfigError);
  CHECK_THROWS_AS(Worldline({{0, 0, 0, 0}, {1, 0, 0, 0}}, {1, 1}, 1.0, SwitchingProfile::off()),
                  ConfigError);
  CHECK_THROWS_AS(Worldline(pts, {1, 1, 1}, 0.0, SwitchingProfile::off()), ConfigError);
}
