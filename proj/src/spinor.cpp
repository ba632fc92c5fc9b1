#include "fokker/spinor.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "fokker/errors.hpp"

namespace fokker {

namespace {

std::array<SpinOperator, 4> make_gammas() {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd sigma[3];
  sigma[0] << 0, 1, 1, 0;
  sigma[1] << 0, -i, i, 0;
  sigma[2] << 1, 0, 0, -1;
  std::array<SpinOperator, 4> g;
  g[0] = SpinOperator::Zero(4, 4);
  g[0].diagonal() << 1, 1, -1, -1;
  for (int k = 0; k < 3; ++k) {
    g[k + 1] = SpinOperator::Zero(4, 4);
    g[k + 1].block(0, 2, 2, 2) = sigma[k];
    g[k + 1].block(2, 0, 2, 2) = -sigma[k];
  }
  return g;
}

const SpinOperator& gamma_in(Slot slot, int mu) {
  switch (slot) {
    case Slot::first:
      return two_particle_gammas().first[mu];
    case Slot::second:
      return two_particle_gammas().second[mu];
    default:
      return gamma_matrices()[mu];
  }
}

}  // namespace

const std::array<SpinOperator, 4>& gamma_matrices() {
  static const std::array<SpinOperator, 4> g = make_gammas();
  return g;
}

const TwoParticleGammas& two_particle_gammas() {
  static const TwoParticleGammas t = [] {
    TwoParticleGammas r;
    const SpinOperator e4 = identity(4);
    for (int mu = 0; mu < 4; ++mu) {
      r.first[mu] = kron(gamma_matrices()[mu], e4);
      r.second[mu] = kron(e4, gamma_matrices()[mu]);
    }
    return r;
  }();
  return t;
}

SpinOperator kron(const SpinOperator& a, const SpinOperator& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

SpinOperator identity(int dim) { return SpinOperator::Identity(dim, dim); }

SpinOperator slash(const FourVector& p, Slot slot) {
  SpinOperator s = gamma_in(slot, 0) * p[0];
  for (int k = 1; k < 4; ++k) s -= gamma_in(slot, k) * p[k];
  return s;
}

SpinOperator dirac_hamiltonian(const FourVector& p, double m, Slot slot) {
  if (!(m > 0.0)) throw DomainError("dirac_hamiltonian: mass must be positive");
  return m * slash(p, slot) - (m * m) * identity(slot_dim(slot));
}

SpinOperator expm(const SpinOperator& a) { return a.exp(); }

SpinOperator evolution_operator(const FourVector& p, double m, double S, double hbar, Slot slot) {
  if (!(S >= 0.0)) throw DomainError("evolution_operator: S must be non-negative");
  if (!(hbar > 0.0)) throw DomainError("evolution_operator: hbar must be positive");
  const Complex factor(0.0, -S / hbar);
  return expm(factor * dirac_hamiltonian(p, m, slot));
}

SpinOperator evolution_operator_closed_form(const FourVector& p, double m, double S, double hbar,
                                            Slot slot) {
  if (!(S >= 0.0)) throw DomainError("evolution_operator: S must be non-negative");
  if (!(m > 0.0)) throw DomainError("evolution_operator: mass must be positive");
  const double theta = m * S / hbar;
  const double p2 = dot(p, p);
  // exp(-i theta P) with P^2 = p2: c(z) I - i s(z) P, z = theta^2 p2.
  double c, s;
  if (std::abs(p2) < 1e-14) {
    const double z = theta * theta * p2;
    c = 1.0 - z / 2.0 + z * z / 24.0;
    s = theta * (1.0 - z / 6.0 + z * z / 120.0);
  } else if (p2 > 0.0) {
    const double q = std::sqrt(p2);
    c = std::cos(theta * q);
    s = std::sin(theta * q) / q;
  } else {
    const double q = std::sqrt(-p2);
    c = std::cosh(theta * q);
    s = std::sinh(theta * q) / q;
  }
  const Complex phase = std::exp(Complex(0.0, m * m * S / hbar));
  const int dim = slot_dim(slot);
  return phase * (c * identity(dim) - Complex(0.0, s) * slash(p, slot));
}

double max_abs_entry(const SpinOperator& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace fokker
