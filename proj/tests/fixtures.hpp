#pragma once

// Shared worldline builders for the unit and acceptance suites.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "fokker/worldline.hpp"

namespace fixtures {

using fokker::FourVector;
using fokker::SwitchingProfile;
using fokker::Worldline;

/// Worldline sampled from x(tau); lapse in proper-time gauge N = |x'|/m.
inline Worldline sample(const std::function<FourVector(double)>& x,
                        const std::function<FourVector(double)>& dx, std::size_t nodes, double mass,
                        SwitchingProfile profile) {
  std::vector<FourVector> pts(nodes);
  std::vector<double> lapse(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    pts[k] = x(t);
    const FourVector v = dx(t);
    lapse[k] = std::sqrt(fokker::dot(v, v)) / mass;
  }
  return Worldline(std::move(pts), std::move(lapse), mass, profile);
}

/// Particle at rest at spatial offset r along x1, coordinate time t0..t1,
/// uniformly parametrized, proper-time gauge.
inline Worldline static_line(double r, double t0, double t1, std::size_t nodes, double mass,
                             SwitchingProfile profile) {
  return Worldline::straight({t0, r, 0, 0}, {t1, r, 0, 0}, nodes, mass, profile);
}

/// Gently curved timelike worldline used by invariance and gradient tests.
inline Worldline wiggly(double offset, double phase, double amp, double duration, std::size_t nodes,
                        double mass, SwitchingProfile profile) {
  const double pi = std::numbers::pi;
  auto x = [=](double t) {
    return FourVector{duration * t + 0.1 * duration * std::sin(pi * t) * std::sin(pi * t) / pi,
                      offset + amp * std::sin(2 * pi * t + phase), amp * std::cos(pi * t + phase),
                      0.3 * amp * t};
  };
  auto dx = [=](double t) {
    return FourVector{duration * (1.0 + 0.1 * std::sin(2 * pi * t)),
                      2 * pi * amp * std::cos(2 * pi * t + phase), -pi * amp * std::sin(pi * t + phase),
                      0.3 * amp};
  };
  return sample(x, dx, nodes, mass, profile);
}

/// Smooth random shift field: sum_{n=1..3} a_n sin(n pi tau), |a_n| <= amp.
inline fokker::ShiftField random_shift(std::mt19937_64& rng, std::size_t nodes, double amp) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double a1 = d(rng), a2 = d(rng), a3 = d(rng);
  std::vector<double> v(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    const double pi = std::numbers::pi;
    v[k] = amp * (a1 * std::sin(pi * t) + 0.5 * a2 * std::sin(2 * pi * t) +
                  0.25 * a3 * std::sin(3 * pi * t));
  }
  return fokker::ShiftField(std::move(v));
}

}  // namespace fixtures
