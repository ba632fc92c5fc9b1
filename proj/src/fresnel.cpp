#include "fokker/fresnel.hpp"

#include <cmath>
#include <numbers>

#include "fokker/errors.hpp"

namespace fokker {

namespace {

using Complex = std::complex<double>;

// Trapezoid aliasing for exp(-a p^2) decays like exp(-pi^2 Re(1/a) / d^2);
// aim for e^-40 both there and in the damped tail.
struct Grid {
  double step;
  long half;
};

Grid grid_for(double eta, double lam_max, double hbar) {
  const double b = lam_max / hbar;
  const double re_inv = eta / (eta * eta + b * b);
  const double step = std::numbers::pi * std::sqrt(re_inv / 40.0);
  const double L = std::sqrt(40.0 / eta);
  return {step, static_cast<long>(std::ceil(L / step))};
}

}  // namespace

Complex damped_fresnel(const Eigen::MatrixXd& A, const Eigen::VectorXd& c, double hbar,
                       double eta) {
  const long n = A.rows();
  if (A.cols() != n || c.size() != n || (n != 1 && n != 2))
    throw ConfigError("damped_fresnel: dimension must be 1 or 2");
  if (!(eta > 0.0) || !(hbar > 0.0)) throw ConfigError("damped_fresnel: eta and hbar must be positive");
  const double lam_max = A.cwiseAbs().rowwise().sum().maxCoeff();
  const Grid g = grid_for(eta, lam_max, hbar);
  const Complex mi(0.0, -1.0 / hbar);
  if (n == 1) {
    Complex sum = 0.0;
    for (long j = -g.half; j <= g.half; ++j) {
      const double p = j * g.step;
      sum += std::exp(mi * (A(0, 0) * p * p + c(0) * p) - eta * p * p);
    }
    return sum * g.step;
  }
  Complex sum = 0.0;
  for (long j = -g.half; j <= g.half; ++j) {
    const double p = j * g.step;
    Complex row = 0.0;
    for (long k = -g.half; k <= g.half; ++k) {
      const double q = k * g.step;
      const double quad = A(0, 0) * p * p + (A(0, 1) + A(1, 0)) * p * q + A(1, 1) * q * q;
      row += std::exp(mi * (quad + c(0) * p + c(1) * q) - eta * (p * p + q * q));
    }
    sum += row;
  }
  return sum * (g.step * g.step);
}

FresnelEstimate fresnel_extrapolated(const Eigen::MatrixXd& A, const Eigen::VectorXd& c,
                                     double hbar, const FresnelOptions& opts) {
  if (opts.levels < 2) throw ConfigError("fresnel_extrapolated: need at least 2 levels");
  FresnelEstimate est;
  double eta = opts.eta0;
  for (int l = 0; l < opts.levels; ++l, eta *= 0.5) {
    est.etas.push_back(eta);
    est.samples.push_back(damped_fresnel(A, c, hbar, eta));
  }
  // Neville table evaluated at eta = 0.
  std::vector<Complex> t = est.samples;
  const auto& x = est.etas;
  Complex prev_top = t.back();
  for (std::size_t m = 1; m < t.size(); ++m) {
    for (std::size_t i = t.size() - 1; i >= m; --i)
      t[i] = (x[i - m] * t[i] - x[i] * t[i - 1]) / (x[i - m] - x[i]);
    if (m + 1 == t.size()) prev_top = t[t.size() - 2];
  }
  est.value = t.back();
  est.error_estimate = std::abs(t.back() - prev_top);
  return est;
}

}  // namespace fokker
