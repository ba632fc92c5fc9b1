#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

namespace fokker {

/// Point or tangent in Minkowski space, components (x0, x1, x2, x3), c = 1.
/// Metric signature is (+,-,-,-) everywhere in this library.
struct FourVector {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  constexpr FourVector() = default;
  constexpr FourVector(double t, double x, double y, double z) : c{t, x, y, z} {}

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  constexpr FourVector& operator+=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr FourVector& operator-=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr FourVector& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  constexpr FourVector& operator/=(double s) {
    for (auto& v : c) v /= s;
    return *this;
  }

  bool finite() const {
    for (double v : c)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend constexpr bool operator==(const FourVector&, const FourVector&) = default;
};

constexpr FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
constexpr FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
constexpr FourVector operator-(FourVector a) { return a *= -1.0; }
constexpr FourVector operator*(FourVector a, double s) { return a *= s; }
constexpr FourVector operator*(double s, FourVector a) { return a *= s; }
constexpr FourVector operator/(FourVector a, double s) { return a /= s; }

/// Minkowski inner product a0 b0 - a1 b1 - a2 b2 - a3 b3.
constexpr double dot(const FourVector& a, const FourVector& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

/// Squared interval (a - b)^2.
constexpr double interval_sq(const FourVector& a, const FourVector& b) {
  const FourVector d = a - b;
  return dot(d, d);
}

/// Index lowering: returns eta_{mu nu} a^nu. Gradients of dot(a, b) with
/// respect to the components of a are lower(b).
constexpr FourVector lower(const FourVector& a) { return {a[0], -a[1], -a[2], -a[3]}; }

/// Euclidean component norm, for convergence checks only.
double component_norm(const FourVector& a);

std::ostream& operator<<(std::ostream& os, const FourVector& v);

}  // namespace fokker
