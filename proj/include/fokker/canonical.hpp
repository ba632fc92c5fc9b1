#pragma once

#include <iosfwd>
#include <vector>

#include "fokker/action.hpp"
#include "fokker/spinor.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

/// Generalized phase-space state on the two proper-time grids. Node k of
/// particle a sits at s = node_proper_time(k) of its worldline.
struct CanonicalState {
  std::vector<FourVector> p1, p2;
  /// Interaction parts of the momenta, kept so constraints and the
  /// Hamiltonian use the same R as the momenta were built with.
  std::vector<FourVector> R1, R2;
  std::vector<double> P_eps1, P_eps2;
  ShiftField eps1 = ShiftField::zero(3), eps2 = ShiftField::zero(3);
  std::vector<double> mu1, mu2;
  std::vector<double> eta1, eta2;
  std::vector<double> lambda1, lambda2, lambda3, lambda4;
  double S1 = 0.0, S2 = 0.0;

  /// Throws ConfigError on inconsistent grid lengths or S <= 0.
  void validate() const;
};

/// Trapezoid weights h N_k (halved at the ends): sum_k w_k f_k ~ int f ds.
std::vector<double> proper_time_weights(const Worldline& w);

/// dx/ds at the nodes.
std::vector<FourVector> proper_velocities(const Worldline& w);

/// p = u (1 + mu) + R, P_eps = u^2 / 2, u = dx/ds, mu = d eps/ds. eta is set
/// to eps and all multipliers to zero.
CanonicalState momenta_from_velocities(const Worldline& w1, const Worldline& w2,
                                       const ShiftField& eps1, const ShiftField& eps2,
                                       const ActionOptions& opts = {});

/// R1, R2 at the nodes with the lightcone integrals taken over the node
/// vectors q_a / (1 + mu_a) in place of the partner velocities. With
/// q_a = u_a (1 + mu_a) this is the R of the momenta; with q_a = p_a it is
/// R[p1, p2].
void interaction_momenta(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                         const ShiftField& eps2, const std::vector<double>& mu1,
                         const std::vector<double>& mu2, const std::vector<FourVector>& q1,
                         const std::vector<FourVector>& q2, std::vector<FourVector>& R1,
                         std::vector<FourVector>& R2, const ActionOptions& opts = {});

struct InvertedVelocities {
  /// u (1 + mu) per node after one Picard step q = p - R[p].
  std::vector<FourVector> q1, q2;
  /// Max component change of the optional second step, and of the first.
  double second_step = 0.0;
  double first_step = 0.0;
};

/// First-order inversion of the momenta. With `check` a second Picard step
/// is taken; NoContraction if it moves further than the first.
InvertedVelocities invert_momenta_first_order(const CanonicalState& state, const Worldline& w1,
                                              const Worldline& w2, bool check = true,
                                              const ActionOptions& opts = {});

/// mu = -1 + sqrt((p - R)^2) / sqrt(2 P_eps) per node.
/// SpacelikeMomentum if (p - R)^2 <= 0 or P_eps <= 0.
void epsilon_velocities(const CanonicalState& state, std::vector<double>& mu1,
                        std::vector<double>& mu2);

struct Constraints {
  std::vector<double> phi1, phi2, phi3, phi4;
};

/// phi1 = 2 P_eps1 (1 + mu1)^2 - (p1 - R1)^2, phi3 = eps1 - eta1 and mirror.
Constraints constraints(const CanonicalState& state);

/// Scalar generalized Hamiltonian:
///   sum_a sum_k w_k [-P + sqrt(2P) sqrt((p - R)^2)] + I_int + charge-shift terms
///   - m1^2 S1 / 2 - m2^2 S2 / 2.
double generalized_hamiltonian(const CanonicalState& state, const Worldline& w1,
                               const Worldline& w2, const ActionOptions& opts = {});

/// Spinor version: sqrt((p - R)^2) replaced by gamma_a^mu (p - R)_mu in the
/// particle's tensor slot; scalar parts times the 16x16 identity.
SpinOperator generalized_hamiltonian_spinor(const CanonicalState& state, const Worldline& w1,
                                            const Worldline& w2, const ActionOptions& opts = {});

/// sum_a sum_k w_k (p . u + P_eps mu) - H + sum_a sum_k w_k (lambda phi).
double canonical_action(const CanonicalState& state, const Worldline& w1, const Worldline& w2,
                        const ActionOptions& opts = {});

/// Plain-text table for one particle:
/// "# tau s p0 p1 p2 p3 R0 R1 R2 R3 P_eps eps mu eta lambda_a lambda_b".
void write_canonical_table(std::ostream& os, const CanonicalState& state, const Worldline& w,
                           Particle which);

}  // namespace fokker
