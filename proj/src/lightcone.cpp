#include "fokker/lightcone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fokker/errors.hpp"

namespace fokker {

namespace {

/// Safeguarded secant (Illinois) on a bracket [a, b] with a sign change.
/// Stops at |f| <= ftol or a bracket at rounding level.
template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double ftol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double m = (a * fb - b * fa) / (fb - fa);
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    const double fm = f(m);
    if (std::abs(fm) <= ftol) return m;
    if ((fm > 0.0) == (fb > 0.0)) {
      b = m;
      fb = fm;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = m;
      fa = fm;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon()) break;
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace

std::vector<LightconeCrossing> find_crossings(const FourVector& x, const Worldline& partner,
                                              std::optional<TauWindow> exclude,
                                              const LightconeTolerances& tol) {
  const std::size_t n = partner.size();
  const double h = partner.step();

  std::vector<double> f(n);
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = interval_sq(x, partner.point(k));
    fmin = std::min(fmin, f[k]);
    fmax = std::max(fmax, f[k]);
  }
  const double span = std::max(fmax - fmin, std::numeric_limits<double>::min());
  // Iterate well past tol.root so implicit root derivatives stay smooth.
  const double ftol = 1e-4 * tol.root * span;

  std::vector<LightconeCrossing> out;
  auto emit = [&](std::size_t cell, double u) {
    const CellPoint where{cell, u};
    const double tau = (static_cast<double>(cell) + u) * h;
    if (exclude && exclude->contains(tau)) return;
    const FourVector y = partner.at(where);
    const FourVector z = x - y;
    const FourVector tangent = (1.0 - u) * velocity(partner, cell) + u * velocity(partner, cell + 1);
    const double dfdtau = -2.0 * dot(z, tangent);
    if (std::abs(dfdtau) < tol.graze * span)
      throw GrazingRoot("tangential lightcone contact at tau = " + std::to_string(tau));
    out.push_back({tau, 1.0 / std::abs(dfdtau),
                   y[0] < x[0] ? CrossingKind::retarded : CrossingKind::advanced, where, tangent});
  };

  for (std::size_t c = 0; c + 1 < n; ++c) {
    const FourVector z0 = x - partner.point(c);
    const FourVector delta = partner.cell_delta(c);
    auto fu = [&](double u) {
      const FourVector z = z0 - u * delta;
      return dot(z, z);
    };
    const double f0 = f[c];
    const double f1 = f[c + 1];
    const bool p0 = f0 > 0.0;
    const bool p1 = f1 > 0.0;

    // Quadratic in u: interior extremum may hide a pair of roots.
    const double dd = dot(delta, delta);
    double uv = -1.0;
    if (dd != 0.0) uv = dot(z0, delta) / dd;
    if (p0 == p1) {
      if (uv > 0.0 && uv < 1.0) {
        const double fv = fu(uv);
        if ((fv > 0.0) != p0) {
          emit(c, refine_root(fu, 0.0, uv, f0, fv, ftol));
          emit(c, refine_root(fu, uv, 1.0, fv, f1, ftol));
        }
      }
      continue;
    }
    emit(c, refine_root(fu, 0.0, 1.0, f0, f1, ftol));
  }
  return out;
}

double lightcone_sum(const FourVector& x, const FourVector& v, const Worldline& partner,
                     std::optional<TauWindow> exclude, const LightconeTolerances& tol) {
  if (partner.profile().switched_off()) return 0.0;
  double sum = 0.0;
  for (const auto& r : find_crossings(x, partner, exclude, tol)) {
    const double e = partner.charge_at(r.where);
    if (e == 0.0) continue;
    sum += e * r.weight * dot(v, r.tangent);
  }
  return sum;
}

FourVector lightcone_vector_sum(const FourVector& x, const Worldline& partner,
                                std::optional<TauWindow> exclude,
                                const LightconeTolerances& tol) {
  FourVector sum;
  if (partner.profile().switched_off()) return sum;
  for (const auto& r : find_crossings(x, partner, exclude, tol)) {
    const double e = partner.charge_at(r.where);
    if (e == 0.0) continue;
    sum += (e * r.weight) * r.tangent;
  }
  return sum;
}

FourVector lightcone_field_sum(const FourVector& x, const Worldline& partner,
                               const std::vector<FourVector>& node_field,
                               const std::function<double(CellPoint)>& density,
                               std::optional<TauWindow> exclude, const LightconeTolerances& tol) {
  if (node_field.size() != partner.size()) throw ConfigError("node field and worldline grids differ");
  FourVector sum;
  for (const auto& r : find_crossings(x, partner, exclude, tol)) {
    const double g = density(r.where);
    if (g == 0.0) continue;
    const std::size_t c = r.where.cell;
    const double u = r.where.u;
    sum += (g * r.weight) * ((1.0 - u) * node_field[c] + u * node_field[c + 1]);
  }
  return sum;
}

}  // namespace fokker
