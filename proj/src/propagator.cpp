#include "fokker/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "fokker/canonical.hpp"
#include "fokker/errors.hpp"
#include "fokker/format.hpp"

namespace fokker {

namespace {

// Upper-right block of exp([[X, Y], [0, X]]): the derivative of exp at X in
// direction Y.
SpinOperator exp_derivative(const SpinOperator& X, const SpinOperator& Y) {
  const auto n = X.rows();
  SpinOperator block = SpinOperator::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = X;
  block.bottomRightCorner(n, n) = X;
  block.topRightCorner(n, n) = Y;
  return expm(block).topRightCorner(n, n);
}

struct SliceExpansion {
  SpinOperator zeroth;
  SpinOperator first;
};

SliceExpansion expand_slices(const InteractingSlices& sl, double hbar) {
  const Complex mi(0.0, -1.0 / hbar);
  const SpinOperator h0 = dirac_hamiltonian(sl.p, sl.m);
  const std::size_t n = sl.ds.size();
  std::vector<SpinOperator> e0(n), l(n);
  for (std::size_t c = 0; c < n; ++c) {
    const SpinOperator x = mi * sl.ds[c] * h0;
    const SpinOperator y =
        -mi * sl.ds[c] * (sl.m * slash(sl.R[c]) + sl.lambda * sl.phi[c] * identity(4));
    e0[c] = expm(x);
    l[c] = exp_derivative(x, y);
  }
  // later slices act from the left
  std::vector<SpinOperator> before(n + 1);
  before[0] = identity(4);
  for (std::size_t c = 0; c < n; ++c) before[c + 1] = e0[c] * before[c];
  SliceExpansion out{before[n], SpinOperator::Zero(4, 4)};
  SpinOperator after = identity(4);
  for (std::size_t c = n; c-- > 0;) {
    out.first += after * l[c] * before[c];
    after = after * e0[c];
  }
  return out;
}

SpinOperator full_product(const InteractingSlices& sl, double hbar) {
  const Complex mi(0.0, -1.0 / hbar);
  SpinOperator u = identity(4);
  for (std::size_t c = 0; c < sl.ds.size(); ++c) {
    const SpinOperator h = dirac_hamiltonian(sl.p - sl.R[c], sl.m) -
                           sl.lambda * sl.phi[c] * identity(4);
    u = expm(mi * sl.ds[c] * h) * u;
  }
  return u;
}

InteractingSlices make_slices(const Worldline& w, double S, const FourVector& p,
                              const std::vector<FourVector>& R, const std::vector<double>& mu,
                              double lambda, bool active) {
  if (S < 0.0) throw ConfigError("proper-time interval must be non-negative");
  InteractingSlices sl;
  sl.m = w.mass();
  sl.p = p;
  sl.lambda = active ? lambda : 0.0;
  const double scale = S / w.total_proper_time();
  const double m2 = w.mass() * w.mass();
  std::vector<double> phi(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const FourVector d = p - R[k];
    phi[k] = m2 * (1.0 + mu[k]) * (1.0 + mu[k]) - dot(d, d);
  }
  for (std::size_t c = 0; c < w.cells(); ++c) {
    sl.ds.push_back(scale * (w.node_proper_time(c + 1) - w.node_proper_time(c)));
    sl.R.push_back(active ? 0.5 * (R[c] + R[c + 1]) : FourVector{});
    sl.phi.push_back(0.5 * (phi[c] + phi[c + 1]));
  }
  return sl;
}

double sensitivity(const InteractingSlices& sl, double hbar) {
  double s = 0.0;
  for (std::size_t c = 0; c < sl.ds.size(); ++c) s += sl.ds[c] * std::abs(sl.phi[c]);
  return s / hbar;
}

}  // namespace

double PropagatorResult::diagnostic(const std::string& name) const {
  for (const auto& [k, v] : diagnostics)
    if (k == name) return v;
  throw ConfigError("no diagnostic named " + name);
}

SpinOperator gaussian_matrix_integral(const Eigen::MatrixXd& A,
                                      const std::vector<SpinOperator>& gammas, double hbar) {
  const auto n = A.rows();
  if (A.cols() != n || static_cast<std::size_t>(n) != gammas.size() || n == 0)
    throw ConfigError("gaussian_matrix_integral: A and gammas disagree in size");
  if (!(hbar > 0.0)) throw ConfigError("gaussian_matrix_integral: hbar must be positive");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw ConfigError("gaussian_matrix_integral: A must be symmetric");
  const auto dim = gammas.front().rows();
  for (const auto& g : gammas)
    if (g.rows() != dim || g.cols() != dim) throw ConfigError("gaussian_matrix_integral: gamma sizes differ");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const auto& ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  if (!(big > 0.0) || ev.cwiseAbs().minCoeff() <= 1e-12 * big)
    throw SingularA("gaussian_matrix_integral: A is singular");
  Complex pre = 1.0;
  for (Eigen::Index j = 0; j < n; ++j)
    pre *= std::sqrt(std::numbers::pi * hbar / (Complex(0.0, 1.0) * ev(j)));

  const Eigen::MatrixXd inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose();
  SpinOperator q = SpinOperator::Zero(dim, dim);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      q += 0.5 * inv(a, b) * (gammas[a] * gammas[b] + gammas[b] * gammas[a]);
  return pre * expm(Complex(0.0, 0.25 / hbar) * q);
}

SpinOperator free_propagator_lattice(double m, const FourVector& p, double S, int steps,
                                     double hbar, Slot slot) {
  if (steps < 1) throw ConfigError("free_propagator_lattice: steps must be >= 1");
  const SpinOperator slice = evolution_operator(p, m, S / steps, hbar, slot);
  SpinOperator u = identity(slot_dim(slot));
  for (int j = 0; j < steps; ++j) u = slice * u;
  return u;
}

PropagatorResult zeroth_order_propagator(double m1, double m2, const FourVector& p1,
                                         const FourVector& p2, double S1, double S2,
                                         double hbar) {
  if (S1 < 0.0 || S2 < 0.0) throw ConfigError("proper-time intervals must be non-negative");
  PropagatorResult r;
  r.order = 0;
  r.S1 = S1;
  r.S2 = S2;
  r.value = kron(evolution_operator(p1, m1, S1, hbar), evolution_operator(p2, m2, S2, hbar));
  const SpinOperator embedded = evolution_operator(p1, m1, S1, hbar, Slot::first) *
                                evolution_operator(p2, m2, S2, hbar, Slot::second);
  r.diagnostics.emplace_back("factorization_residual", max_abs_entry(r.value - embedded));
  return r;
}

ShellTrajectory shell_trajectory(const Worldline& self, const Worldline& partner,
                                 const ShiftField& eps, double lambda,
                                 const ActionOptions& opts) {
  if (eps.size() != self.size()) throw ConfigError("shift field and worldline grids differ");
  const std::size_t K = self.size();
  const auto deps = eps.tau_derivative(self.step());
  ShellTrajectory t;
  t.s.resize(K);
  t.source.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) t.s[k] = self.node_proper_time(k);
  std::vector<double> rate(K, 0.0);  // dP/dtau
  for_each_index(opts.exec, K, [&](std::size_t k) {
    const double N = self.lapse_at(k);
    double w = 0.0;
    if (deps[k] != 0.0)
      w = w_functional_at(self, partner, self.point(k), velocity(self, k), self.tau(k), opts) / N;
    t.source[k] = deps[k] / N * w;
    rate[k] = -(deps[k] * w + lambda * N);
  });
  const double m2 = self.mass() * self.mass();
  t.P_eps.resize(K);
  t.P_eps[0] = 0.5 * m2;
  for (std::size_t k = 1; k < K; ++k)
    t.P_eps[k] = t.P_eps[k - 1] + 0.5 * self.step() * (rate[k - 1] + rate[k]);
  t.delta_P = t.P_eps.back() - t.P_eps.front();
  t.S = self.total_proper_time();
  return t;
}

namespace {

void fix_shell(ShellTrajectory& t, double m2, double tol_shell, const ShellWindow& win,
               const char* who) {
  const double tol = tol_shell * m2;
  const double target = 0.5 * m2;
  std::size_t exit = t.P_eps.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < t.P_eps.size(); ++k) {
    const double dev = std::abs(t.P_eps[k] - target);
    worst = std::max(worst, dev);
    if (dev > tol && exit == t.P_eps.size()) exit = k;
  }
  if (exit == t.P_eps.size()) {
    t.left_shell = false;
    t.residual = worst;
    return;
  }
  t.left_shell = true;
  for (std::size_t k = exit; k < t.P_eps.size(); ++k) {
    if (t.s[k] < win.lo) continue;
    if (t.s[k] > win.hi) break;
    const double dev = std::abs(t.P_eps[k] - target);
    if (dev <= tol) {
      t.S = t.s[k];
      t.residual = dev;
      return;
    }
  }
  throw NoShellReturn(std::string("P_eps of particle ") + who +
                      " does not return to m^2/2 inside the search window");
}

}  // namespace

ProperTimeFixing proper_time_fixing(const Worldline& w1, const Worldline& w2,
                                    const ShiftField& eps1, const ShiftField& eps2,
                                    const ProperTimeFixingOptions& opts) {
  if (!(opts.tol_shell > 0.0)) throw ConfigError("tol_shell must be positive");
  ProperTimeFixing out;
  out.first = shell_trajectory(w1, w2, eps1, opts.lambda3, opts.action);
  out.second = shell_trajectory(w2, w1, eps2, opts.lambda4, opts.action);
  fix_shell(out.first, w1.mass() * w1.mass(), opts.tol_shell, opts.window1, "1");
  fix_shell(out.second, w2.mass() * w2.mass(), opts.tol_shell, opts.window2, "2");
  out.S1 = out.first.S;
  out.S2 = out.second.S;
  return out;
}

std::pair<InteractingSlices, InteractingSlices> interacting_slices(
    double S1, double S2, const FourVector& p1, const FourVector& p2, const Worldline& w1,
    const Worldline& w2, const ShiftField& eps1, const ShiftField& eps2,
    const FirstOrderOptions& opts) {
  if (eps1.size() != w1.size() || eps2.size() != w2.size())
    throw ConfigError("shift field and worldline grids differ");
  const auto mu1 = eps1.proper_time_rate(w1);
  const auto mu2 = eps2.proper_time_rate(w2);
  const std::vector<FourVector> q1(w1.size(), p1), q2(w2.size(), p2);
  std::vector<FourVector> R1, R2;
  interaction_momenta(w1, w2, eps1, eps2, mu1, mu2, q1, q2, R1, R2, opts.action);
  const bool on1 = opts.insertion != Insertion::second;
  const bool on2 = opts.insertion != Insertion::first;
  return {make_slices(w1, S1, p1, R1, mu1, opts.lambda1, on1),
          make_slices(w2, S2, p2, R2, mu2, opts.lambda2, on2)};
}

PropagatorResult first_order_propagator(double S1, double S2, const FourVector& p1,
                                        const FourVector& p2, const Worldline& w1,
                                        const Worldline& w2, const ShiftField& eps1,
                                        const ShiftField& eps2, const FirstOrderOptions& opts) {
  const auto [a, b] = interacting_slices(S1, S2, p1, p2, w1, w2, eps1, eps2, opts);
  const auto x1 = expand_slices(a, opts.hbar);
  const auto x2 = expand_slices(b, opts.hbar);
  PropagatorResult r;
  r.order = 1;
  r.S1 = S1;
  r.S2 = S2;
  r.value = kron(x1.first, x2.zeroth) + kron(x1.zeroth, x2.first);
  double rmax1 = 0.0, rmax2 = 0.0;
  for (const auto& v : a.R) rmax1 = std::max(rmax1, component_norm(v));
  for (const auto& v : b.R) rmax2 = std::max(rmax2, component_norm(v));
  r.diagnostics.emplace_back("slices_1", static_cast<double>(a.ds.size()));
  r.diagnostics.emplace_back("slices_2", static_cast<double>(b.ds.size()));
  r.diagnostics.emplace_back("max_R_1", rmax1);
  r.diagnostics.emplace_back("max_R_2", rmax2);
  r.diagnostics.emplace_back("lambda1_sensitivity", sensitivity(a, opts.hbar));
  r.diagnostics.emplace_back("lambda2_sensitivity", sensitivity(b, opts.hbar));
  return r;
}

SpinOperator interacting_propagator(double S1, double S2, const FourVector& p1,
                                    const FourVector& p2, const Worldline& w1,
                                    const Worldline& w2, const ShiftField& eps1,
                                    const ShiftField& eps2, const FirstOrderOptions& opts) {
  const auto [a, b] = interacting_slices(S1, S2, p1, p2, w1, w2, eps1, eps2, opts);
  return kron(full_product(a, opts.hbar), full_product(b, opts.hbar));
}

void write_propagator(std::ostream& os, const PropagatorResult& r) {
  os << "# order " << r.order << '\n';
  os << "# S1 " << fmt_real(r.S1) << " S2 " << fmt_real(r.S2) << '\n';
  for (const auto& [k, v] : r.diagnostics) os << "# " << k << ' ' << fmt_real(v) << '\n';
  auto table = [&](const char* name, auto part) {
    os << "# " << name << '\n';
    for (Eigen::Index i = 0; i < r.value.rows(); ++i) {
      for (Eigen::Index j = 0; j < r.value.cols(); ++j)
        os << (j ? " " : "") << fmt_real(part(r.value(i, j)));
      os << '\n';
    }
  };
  table("real", [](Complex z) { return z.real(); });
  table("imag", [](Complex z) { return z.imag(); });
}

}  // namespace fokker
