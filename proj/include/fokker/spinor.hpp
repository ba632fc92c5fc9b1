#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "fokker/minkowski.hpp"

namespace fokker {

/// Complex square matrix on bi-spinors (4x4) or on the two-particle tensor
/// product (16x16).
using SpinOperator = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Which tensor slot an operator acts on. `single` is the bare 4x4 space.
enum class Slot { single, first, second };

inline int slot_dim(Slot s) { return s == Slot::single ? 4 : 16; }

/// Dirac representation: gamma^0 = diag(1,1,-1,-1), gamma^i = [[0, sigma_i], [-sigma_i, 0]].
const std::array<SpinOperator, 4>& gamma_matrices();

/// gamma^mu (x) E4 and E4 (x) gamma^mu.
struct TwoParticleGammas {
  std::array<SpinOperator, 4> first;
  std::array<SpinOperator, 4> second;
};
const TwoParticleGammas& two_particle_gammas();

SpinOperator kron(const SpinOperator& a, const SpinOperator& b);
SpinOperator identity(int dim);

/// gamma^mu p_mu = gamma^0 p^0 - gamma . p, placed in `slot`.
SpinOperator slash(const FourVector& p, Slot slot = Slot::single);

/// m slash(p) - m^2 (times the identity).
SpinOperator dirac_hamiltonian(const FourVector& p, double m, Slot slot = Slot::single);

/// exp(-(i/hbar) H S) by scaling and squaring.
SpinOperator evolution_operator(const FourVector& p, double m, double S, double hbar = 1.0,
                                Slot slot = Slot::single);

/// Same operator from slash(p)^2 = p^2:
///   e^{i m^2 S/hbar} [cos(theta |p|) - i sin(theta |p|) slash(p)/|p|],  theta = m S / hbar,
/// hyperbolic for spacelike p and a series near p^2 = 0.
SpinOperator evolution_operator_closed_form(const FourVector& p, double m, double S,
                                            double hbar = 1.0, Slot slot = Slot::single);

/// Matrix exponential (Pade approximant with scaling and squaring).
SpinOperator expm(const SpinOperator& a);

double max_abs_entry(const SpinOperator& a);

}  // namespace fokker
