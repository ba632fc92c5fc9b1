#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "fokker/minkowski.hpp"

namespace fokker {

/// Charge as a function of proper time: zero outside (s_on, s_off), e_max on
/// [s_on + ramp, s_off - ramp], C1 smoothstep joins. s_on = -inf and
/// s_off = +inf give a charge that is never switched.
struct SwitchingProfile {
  double e_max = 0.0;
  double s_on = -std::numeric_limits<double>::infinity();
  double s_off = std::numeric_limits<double>::infinity();
  double ramp = 1.0;

  static SwitchingProfile always_on(double e);
  static SwitchingProfile off() { return always_on(0.0); }
  /// Throws ConfigError unless s_on < s_off, ramp > 0 and both ramps fit.
  static SwitchingProfile pulse(double e, double s_on, double s_off, double ramp);

  double charge(double s) const;
  /// Analytic de/ds.
  double rate(double s) const;
  SwitchingProfile scaled(double factor) const;
  bool switched_off() const { return e_max == 0.0; }
};

/// Position inside the piecewise-linear interpolant: cell c, local u in [0,1].
struct CellPoint {
  std::size_t cell = 0;
  double u = 0.0;
};

/// Discretized worldline on the uniform grid tau_k = k/(K-1). Immutable.
///
/// Between nodes the worldline is the piecewise-linear interpolant and the
/// lapse is linearly interpolated, so cumulative proper time is exact for
/// the interpolated lapse (trapezoid on nodes, midpoint on the cell average).
class Worldline {
 public:
  Worldline(std::vector<FourVector> points, std::vector<double> lapse, double mass,
            SwitchingProfile profile);

  /// Uniformly parametrized straight segment in proper-time gauge
  /// (N = |end - start| / m, so |dx/ds| = m).
  static Worldline straight(const FourVector& start, const FourVector& end, std::size_t nodes,
                            double mass, SwitchingProfile profile);

  std::size_t size() const { return points_.size(); }
  std::size_t cells() const { return points_.size() - 1; }
  double step() const { return step_; }
  double tau(std::size_t k) const { return static_cast<double>(k) * step_; }

  const std::vector<FourVector>& points() const { return points_; }
  const FourVector& point(std::size_t k) const { return points_[k]; }
  const std::vector<double>& lapse() const { return lapse_; }
  double lapse_at(std::size_t k) const { return lapse_[k]; }
  double mass() const { return mass_; }
  const SwitchingProfile& profile() const { return profile_; }

  FourVector cell_delta(std::size_t c) const { return points_[c + 1] - points_[c]; }
  FourVector cell_slope(std::size_t c) const { return cell_delta(c) / step_; }
  double cell_lapse(std::size_t c) const { return 0.5 * (lapse_[c] + lapse_[c + 1]); }

  CellPoint locate(double tau) const;
  FourVector at(CellPoint p) const;
  FourVector position(double tau) const { return at(locate(tau)); }
  double lapse_at(CellPoint p) const;

  double node_proper_time(std::size_t k) const { return node_s_[k]; }
  double proper_time_at(CellPoint p) const;
  double total_proper_time() const { return node_s_.back(); }

  double charge_at(CellPoint p) const { return profile_.charge(proper_time_at(p)); }

  Worldline with_points(std::vector<FourVector> points) const;
  Worldline with_lapse(std::vector<double> lapse) const;
  Worldline with_profile(SwitchingProfile profile) const;

 private:
  std::vector<FourVector> points_;
  std::vector<double> lapse_;
  std::vector<double> node_s_;
  double mass_;
  SwitchingProfile profile_;
  double step_;
};

/// Integral of the lapse from 0 to tau. Throws DomainError outside [0,1].
double proper_time(const Worldline& w, double tau);

/// dx/dtau at node k: central difference inside, second-order one-sided at
/// the ends.
FourVector velocity(const Worldline& w, std::size_t k);
std::vector<FourVector> node_velocities(const Worldline& w);

/// Proper-time shift samples eps_k on the worldline grid; eps_0 = eps_{K-1} = 0.
class ShiftField {
 public:
  explicit ShiftField(std::vector<double> values);
  static ShiftField zero(std::size_t nodes);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }
  double at(CellPoint p) const;
  double max_abs() const;

  /// d eps / d tau. Central inside, first-order one-sided at the ends, which
  /// makes the trapezoid sum of the derivative telescope to zero.
  std::vector<double> tau_derivative(double step) const;
  /// mu_k = d eps / ds = (d eps / d tau) / N_k.
  std::vector<double> proper_time_rate(const Worldline& w) const;

  ShiftField scaled(double factor) const;
  ShiftField operator-() const { return scaled(-1.0); }

 private:
  std::vector<double> values_;
};

/// First-order reparametrization generated by eps: N -> N - d eps/d tau and
/// points resampled at tau - eps/N (cubic Hermite). Throws FoldOver when the
/// lapse turns non-positive or the resampled grid is non-monotone.
Worldline reparametrize(const Worldline& w, const ShiftField& eps);

/// Plain-text table: one row per node "tau x0 x1 x2 x3 N".
void write_worldline_table(std::ostream& os, const Worldline& w);
Worldline read_worldline_table(std::istream& is, double mass, SwitchingProfile profile);

}  // namespace fokker
