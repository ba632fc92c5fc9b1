#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fokker/minkowski.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

enum class CrossingKind { retarded, advanced };

/// One root of s^2(tau) = (x - partner(tau))^2 = 0.
struct LightconeCrossing {
  double tau_root = 0.0;
  /// 1 / |d s^2 / d tau| at the root.
  double weight = 0.0;
  CrossingKind kind = CrossingKind::retarded;
  CellPoint where;
  /// dy/dtau at the root, interpolated from node velocities.
  FourVector tangent;
};

/// Open parameter interval (lo, hi) whose roots are dropped.
struct TauWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double tau) const { return tau > lo && tau < hi; }
};

/// Window |tau' - tau| < cut_cells * step used for self-interaction terms.
inline TauWindow self_window(double tau, double cut_cells, double step) {
  return {tau - cut_cells * step, tau + cut_cells * step};
}

struct LightconeTolerances {
  /// Root accepted when |s^2| <= root * (span of s^2 over the nodes).
  double root = 1e-12;
  /// GrazingRoot when |d s^2/d tau| < graze * (span of s^2 over the nodes).
  double graze = 1e-8;
};

/// All crossings of the lightcone of x with the piecewise-linear partner,
/// retarded and advanced, ordered by tau. Sign changes are bracketed on the
/// grid (plus the interior extremum of each cell's quadratic) and refined by
/// a safeguarded secant iteration.
std::vector<LightconeCrossing> find_crossings(const FourVector& x, const Worldline& partner,
                                              std::optional<TauWindow> exclude = std::nullopt,
                                              const LightconeTolerances& tol = {});

/// Sum over crossings of e_partner(s(tau*)) * weight * (v . dy/dtau), the
/// lightcone reduction of  int e dtau delta(s^2) v . y'.
double lightcone_sum(const FourVector& x, const FourVector& v, const Worldline& partner,
                     std::optional<TauWindow> exclude = std::nullopt,
                     const LightconeTolerances& tol = {});

/// Vector version: sum of e_partner * weight * dy/dtau.
FourVector lightcone_vector_sum(const FourVector& x, const Worldline& partner,
                                std::optional<TauWindow> exclude = std::nullopt,
                                const LightconeTolerances& tol = {});

/// Generalized vector sum: sum of g(root) * weight * F(root), with F linearly
/// interpolated from per-node values (tau-derivative units, like dy/dtau)
/// and g a scalar density evaluated at the root.
FourVector lightcone_field_sum(const FourVector& x, const Worldline& partner,
                               const std::vector<FourVector>& node_field,
                               const std::function<double(CellPoint)>& density,
                               std::optional<TauWindow> exclude = std::nullopt,
                               const LightconeTolerances& tol = {});

}  // namespace fokker
