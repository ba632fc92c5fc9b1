#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace fokker {

/// int d^n p exp[-(i/hbar)(p^T A p + c . p)] exp(-eta |p|^2) for n = 1 or 2,
/// by the trapezoid rule on a grid sized from eta and the spectrum of A.
std::complex<double> damped_fresnel(const Eigen::MatrixXd& A, const Eigen::VectorXd& c,
                                    double hbar, double eta);

struct FresnelOptions {
  double eta0 = 0.2;
  /// Damping levels eta0, eta0/2, ... used by the extrapolation.
  int levels = 6;
};

struct FresnelEstimate {
  std::complex<double> value;
  /// |difference| of the two highest-order extrapolants.
  double error_estimate = 0.0;
  std::vector<double> etas;
  std::vector<std::complex<double>> samples;
};

/// Damped quadratures at a halving sequence of eta, extrapolated to eta = 0
/// by Neville's polynomial scheme.
FresnelEstimate fresnel_extrapolated(const Eigen::MatrixXd& A, const Eigen::VectorXd& c,
                                     double hbar, const FresnelOptions& opts = {});

}  // namespace fokker
