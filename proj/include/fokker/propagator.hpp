#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fokker/action.hpp"
#include "fokker/spinor.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

struct PropagatorResult {
  SpinOperator value;
  int order = 0;
  double S1 = 0.0, S2 = 0.0;
  /// Name/value pairs in insertion order.
  std::vector<std::pair<std::string, double>> diagnostics;

  double diagnostic(const std::string& name) const;
};

/// prod_j sqrt(pi hbar / (i a_j)) * expm((i / 4 hbar) sum A^-1_ab (G_a G_b + G_b G_a) / 2),
/// a_j the eigenvalues of the symmetric matrix A, principal square roots.
/// SingularA when min |a_j| <= 1e-12 max |a_j|.
SpinOperator gaussian_matrix_integral(const Eigen::MatrixXd& A,
                                      const std::vector<SpinOperator>& gammas, double hbar = 1.0);

/// Ordered product of `steps` slices exp(-(i/hbar) H(p) S/steps).
SpinOperator free_propagator_lattice(double m, const FourVector& p, double S, int steps,
                                     double hbar = 1.0, Slot slot = Slot::single);

/// T1(S1) (x) T2(S2); diagnostic "factorization_residual" compares with the
/// product of the two embedded single-slot operators.
PropagatorResult zeroth_order_propagator(double m1, double m2, const FourVector& p1,
                                         const FourVector& p2, double S1, double S2,
                                         double hbar = 1.0);

/// Closed interval of proper time searched for the shell return.
struct ShellWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct ProperTimeFixingOptions {
  double lambda3 = 0.0, lambda4 = 0.0;
  /// Shell tolerance in units of m^2.
  double tol_shell = 1e-8;
  ShellWindow window1, window2;
  ActionOptions action;
};

/// P_eps along one worldline, integrated from P = m^2/2 at s = 0 with
/// dP/ds = -mu W - lambda (trapezoid in tau, so a constant W telescopes).
struct ShellTrajectory {
  std::vector<double> s;
  std::vector<double> P_eps;
  /// mu W per node, W the interaction density in proper-time units.
  std::vector<double> source;
  /// Proper time at which P returns to m^2/2; the total proper time when
  /// the trajectory never leaves the shell.
  double S = 0.0;
  /// |P(S) - m^2/2|.
  double residual = 0.0;
  double delta_P = 0.0;
  bool left_shell = false;
};

ShellTrajectory shell_trajectory(const Worldline& self, const Worldline& partner,
                                 const ShiftField& eps, double lambda,
                                 const ActionOptions& opts = {});

struct ProperTimeFixing {
  ShellTrajectory first, second;
  double S1 = 0.0, S2 = 0.0;
};

/// Both trajectories and their shell-return times. NoShellReturn when a
/// trajectory leaves the shell and does not come back inside its window.
ProperTimeFixing proper_time_fixing(const Worldline& w1, const Worldline& w2,
                                    const ShiftField& eps1, const ShiftField& eps2,
                                    const ProperTimeFixingOptions& opts = {});

enum class Insertion { both, first, second };

struct FirstOrderOptions {
  double hbar = 1.0;
  Insertion insertion = Insertion::both;
  /// Constraint multipliers; enter the slice generator as -lambda phi.
  double lambda1 = 0.0, lambda2 = 0.0;
  ActionOptions action;
};

/// Slice data shared by the expansion and the full product: each particle's
/// cells carry ds (rescaled so they sum to S) and R[p1, p2] at the midpoint.
struct InteractingSlices {
  double m = 0.0;
  FourVector p;
  std::vector<double> ds;
  std::vector<FourVector> R;
  std::vector<double> phi;
  double lambda = 0.0;
};

std::pair<InteractingSlices, InteractingSlices> interacting_slices(
    double S1, double S2, const FourVector& p1, const FourVector& p2, const Worldline& w1,
    const Worldline& w2, const ShiftField& eps1, const ShiftField& eps2,
    const FirstOrderOptions& opts = {});

/// The term linear in R (and lambda) of the proper-time-ordered product of
/// slice exponentials exp(-(i/hbar)(m slash(p - R) - m^2 - lambda phi) ds),
/// O1 (x) T2 + T1 (x) O2 with the selected insertions. order = 1.
PropagatorResult first_order_propagator(double S1, double S2, const FourVector& p1,
                                        const FourVector& p2, const Worldline& w1,
                                        const Worldline& w2, const ShiftField& eps1,
                                        const ShiftField& eps2, const FirstOrderOptions& opts = {});

/// The full ordered product with the selected insertions, to all orders in R.
SpinOperator interacting_propagator(double S1, double S2, const FourVector& p1,
                                    const FourVector& p2, const Worldline& w1,
                                    const Worldline& w2, const ShiftField& eps1,
                                    const ShiftField& eps2, const FirstOrderOptions& opts = {});

/// "# order", "# S1 S2", diagnostics as "# name value", then the real and
/// imaginary entry tables.
void write_propagator(std::ostream& os, const PropagatorResult& r);

}  // namespace fokker
