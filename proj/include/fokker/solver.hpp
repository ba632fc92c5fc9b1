#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fokker/action.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

/// dI/dx_k^mu and dI/dN_k of the discrete fokker_action at every node.
/// The solver uses the interior x entries; endpoints are boundary data.
struct ActionGradient {
  std::vector<FourVector> x1, x2;
  std::vector<double> N1, N2;
};

/// Analytic gradient. Lightcone roots are differentiated implicitly through
/// s^2(tau*) = 0, including the dependence of the interpolated tangent on
/// the neighbouring nodes and of the charges on the cumulative proper time.
ActionGradient action_gradient(const Worldline& w1, const Worldline& w2,
                               const ActionOptions& opts = {});

/// Same worldline with the constant lapse sqrt(sum_c h v_c^2) / m, the
/// stationary value of the kinetic term among constant lapses.
Worldline gauge_fixed(const Worldline& w);

struct SolverOptions {
  /// Converged when gradient_norm <= tol_grad * action scale.
  double tol_grad = 1e-8;
  int max_iterations = 500;
  bool freeze1 = false, freeze2 = false;
  /// Largest allowed component of a step, relative to the largest
  /// component of the worldline's end-to-end separation.
  double max_step = 0.1;
  /// Relative step for the finite-difference Jacobian of the gradient.
  double jacobian_step = 1e-6;
  ActionOptions action;
};

struct StationaryReport {
  Worldline w1, w2;
  /// Max |dI/dx_k^mu| over interior nodes of the free particles.
  double gradient_norm = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  ActionBreakdown action;
  bool converged = false;
};

double gradient_norm(const ActionGradient& g, bool use1, bool use2);

/// Solves grad_x I = 0 for the interior nodes by damped Gauss-Newton with
/// backtracking on |grad|^2. The lapse is re-fixed by `gauge_fixed` before
/// every iteration. Never throws for non-convergence.
StationaryReport find_stationary(const Worldline& w1, const Worldline& w2,
                                 const SolverOptions& opts = {});

std::string stationary_csv_header();
std::string stationary_csv_row(const StationaryReport& r);

}  // namespace fokker
