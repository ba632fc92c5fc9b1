#include "fokker/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fokker/errors.hpp"
#include "fokker/format.hpp"
#include "fokker/kernels.hpp"
#include "fokker/lightcone.hpp"

namespace fokker {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw ConfigError(std::string("canonical state: ") + what + " has wrong length");
}

// N_j q_j / (1 + mu_j): the tau-derivative field the lightcone sums integrate.
std::vector<FourVector> tau_field(const Worldline& w, const std::vector<FourVector>& q,
                                  const std::vector<double>& mu) {
  std::vector<FourVector> f(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) f[k] = (w.lapse_at(k) / (1.0 + mu[k])) * q[k];
  return f;
}

void r_terms_for(const Worldline& self, const Worldline& partner, const ShiftField& eps_self,
                 const ShiftField& eps_partner, const std::vector<FourVector>& field_self,
                 const std::vector<FourVector>& field_partner, std::vector<FourVector>& out,
                 const ActionOptions& opts) {
  out.assign(self.size(), FourVector{});
  const auto& prof = self.profile();
  const auto& pprof = partner.profile();
  auto self_charge = [&](CellPoint p) { return self.charge_at(p); };
  auto partner_charge = [&](CellPoint p) { return partner.charge_at(p); };
  auto partner_shift = [&](CellPoint p) {
    return eps_partner.at(p) * pprof.rate(partner.proper_time_at(p));
  };
  for_each_index(opts.exec, self.size(), [&](std::size_t k) {
    const double s = self.node_proper_time(k);
    const double e = prof.charge(s);
    const double shift = eps_self[k] * prof.rate(s);
    if (e == 0.0 && shift == 0.0) return;
    const FourVector& x = self.point(k);
    FourVector r;
    const double c_self = e + 2.0 * shift;
    if (c_self != 0.0) {
      const auto cut = self_window(self.tau(k), opts.self_cut_cells, self.step());
      r += c_self * lightcone_field_sum(x, self, field_self, self_charge, cut, opts.tol);
    }
    const double c_cross = e + shift;
    if (c_cross != 0.0 && !pprof.switched_off())
      r += c_cross * lightcone_field_sum(x, partner, field_partner, partner_charge, std::nullopt,
                                         opts.tol);
    if (e != 0.0 && !pprof.switched_off())
      r += e * lightcone_field_sum(x, partner, field_partner, partner_shift, std::nullopt, opts.tol);
    out[k] = r;
  });
}

double max_component_diff(const std::vector<FourVector>& a, const std::vector<FourVector>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, component_norm(a[k] - b[k]));
  return m;
}

double interaction_part(const CanonicalState& st, const Worldline& w1, const Worldline& w2,
                        const ActionOptions& opts) {
  return fokker_action(w1, w2, opts).interaction() +
         charge_shift_action(w1, w2, st.eps1, st.eps2, opts);
}

}  // namespace

void CanonicalState::validate() const {
  const std::size_t n1 = p1.size();
  const std::size_t n2 = p2.size();
  require_size(R1.size(), n1, "R1");
  require_size(P_eps1.size(), n1, "P_eps1");
  require_size(eps1.size(), n1, "eps1");
  require_size(mu1.size(), n1, "mu1");
  require_size(eta1.size(), n1, "eta1");
  require_size(lambda1.size(), n1, "lambda1");
  require_size(lambda3.size(), n1, "lambda3");
  require_size(R2.size(), n2, "R2");
  require_size(P_eps2.size(), n2, "P_eps2");
  require_size(eps2.size(), n2, "eps2");
  require_size(mu2.size(), n2, "mu2");
  require_size(eta2.size(), n2, "eta2");
  require_size(lambda2.size(), n2, "lambda2");
  require_size(lambda4.size(), n2, "lambda4");
  if (!(S1 > 0.0) || !(S2 > 0.0)) throw ConfigError("canonical state: S1, S2 must be positive");
}

std::vector<double> proper_time_weights(const Worldline& w) {
  std::vector<double> wt(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) wt[k] = w.step() * w.lapse_at(k);
  wt.front() *= 0.5;
  wt.back() *= 0.5;
  return wt;
}

std::vector<FourVector> proper_velocities(const Worldline& w) {
  auto v = node_velocities(w);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] /= w.lapse_at(k);
  return v;
}

void interaction_momenta(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                         const ShiftField& eps2, const std::vector<double>& mu1,
                         const std::vector<double>& mu2, const std::vector<FourVector>& q1,
                         const std::vector<FourVector>& q2, std::vector<FourVector>& R1,
                         std::vector<FourVector>& R2, const ActionOptions& opts) {
  const auto f1 = tau_field(w1, q1, mu1);
  const auto f2 = tau_field(w2, q2, mu2);
  r_terms_for(w1, w2, eps1, eps2, f1, f2, R1, opts);
  r_terms_for(w2, w1, eps2, eps1, f2, f1, R2, opts);
}

CanonicalState momenta_from_velocities(const Worldline& w1, const Worldline& w2,
                                       const ShiftField& eps1, const ShiftField& eps2,
                                       const ActionOptions& opts) {
  if (eps1.size() != w1.size() || eps2.size() != w2.size())
    throw ConfigError("shift field and worldline grids differ");
  CanonicalState st;
  st.eps1 = eps1;
  st.eps2 = eps2;
  st.mu1 = eps1.proper_time_rate(w1);
  st.mu2 = eps2.proper_time_rate(w2);
  const auto u1 = proper_velocities(w1);
  const auto u2 = proper_velocities(w2);
  std::vector<FourVector> q1(u1.size()), q2(u2.size());
  for (std::size_t k = 0; k < u1.size(); ++k) q1[k] = (1.0 + st.mu1[k]) * u1[k];
  for (std::size_t k = 0; k < u2.size(); ++k) q2[k] = (1.0 + st.mu2[k]) * u2[k];
  interaction_momenta(w1, w2, eps1, eps2, st.mu1, st.mu2, q1, q2, st.R1, st.R2, opts);

  st.p1.resize(u1.size());
  st.P_eps1.resize(u1.size());
  for (std::size_t k = 0; k < u1.size(); ++k) {
    st.p1[k] = q1[k] + st.R1[k];
    st.P_eps1[k] = 0.5 * dot(u1[k], u1[k]);
  }
  st.p2.resize(u2.size());
  st.P_eps2.resize(u2.size());
  for (std::size_t k = 0; k < u2.size(); ++k) {
    st.p2[k] = q2[k] + st.R2[k];
    st.P_eps2[k] = 0.5 * dot(u2[k], u2[k]);
  }
  st.eta1 = eps1.values();
  st.eta2 = eps2.values();
  st.lambda1.assign(u1.size(), 0.0);
  st.lambda3.assign(u1.size(), 0.0);
  st.lambda2.assign(u2.size(), 0.0);
  st.lambda4.assign(u2.size(), 0.0);
  st.S1 = w1.total_proper_time();
  st.S2 = w2.total_proper_time();
  return st;
}

InvertedVelocities invert_momenta_first_order(const CanonicalState& state, const Worldline& w1,
                                              const Worldline& w2, bool check,
                                              const ActionOptions& opts) {
  state.validate();
  require_size(w1.size(), state.p1.size(), "worldline 1");
  require_size(w2.size(), state.p2.size(), "worldline 2");
  InvertedVelocities out;
  std::vector<FourVector> r1, r2;
  interaction_momenta(w1, w2, state.eps1, state.eps2, state.mu1, state.mu2, state.p1, state.p2, r1,
                      r2, opts);
  out.q1 = state.p1;
  out.q2 = state.p2;
  for (std::size_t k = 0; k < r1.size(); ++k) out.q1[k] -= r1[k];
  for (std::size_t k = 0; k < r2.size(); ++k) out.q2[k] -= r2[k];
  out.first_step = std::max(max_component_diff(out.q1, state.p1), max_component_diff(out.q2, state.p2));
  if (!check) return out;

  interaction_momenta(w1, w2, state.eps1, state.eps2, state.mu1, state.mu2, out.q1, out.q2, r1, r2,
                      opts);
  std::vector<FourVector> n1 = state.p1, n2 = state.p2;
  for (std::size_t k = 0; k < r1.size(); ++k) n1[k] -= r1[k];
  for (std::size_t k = 0; k < r2.size(); ++k) n2[k] -= r2[k];
  out.second_step = std::max(max_component_diff(n1, out.q1), max_component_diff(n2, out.q2));
  if (out.second_step > out.first_step)
    throw NoContraction("momentum inversion does not contract: second step " +
                        fmt_real(out.second_step) + " exceeds first " + fmt_real(out.first_step));
  return out;
}

void epsilon_velocities(const CanonicalState& state, std::vector<double>& mu1,
                        std::vector<double>& mu2) {
  auto solve = [](const std::vector<FourVector>& p, const std::vector<FourVector>& R,
                  const std::vector<double>& P, std::vector<double>& mu) {
    mu.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const FourVector d = p[k] - R[k];
      const double d2 = dot(d, d);
      if (!(d2 > 0.0)) throw SpacelikeMomentum("(p - R)^2 <= 0 at node " + std::to_string(k));
      if (!(P[k] > 0.0)) throw SpacelikeMomentum("P_eps <= 0 at node " + std::to_string(k));
      mu[k] = -1.0 + std::sqrt(d2) / std::sqrt(2.0 * P[k]);
    }
  };
  state.validate();
  solve(state.p1, state.R1, state.P_eps1, mu1);
  solve(state.p2, state.R2, state.P_eps2, mu2);
}

Constraints constraints(const CanonicalState& state) {
  state.validate();
  Constraints c;
  auto quad = [](const std::vector<FourVector>& p, const std::vector<FourVector>& R,
                 const std::vector<double>& P, const std::vector<double>& mu) {
    std::vector<double> phi(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const FourVector d = p[k] - R[k];
      phi[k] = 2.0 * P[k] * (1.0 + mu[k]) * (1.0 + mu[k]) - dot(d, d);
    }
    return phi;
  };
  auto lin = [](const ShiftField& eps, const std::vector<double>& eta) {
    std::vector<double> phi(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) phi[k] = eps[k] - eta[k];
    return phi;
  };
  c.phi1 = quad(state.p1, state.R1, state.P_eps1, state.mu1);
  c.phi2 = quad(state.p2, state.R2, state.P_eps2, state.mu2);
  c.phi3 = lin(state.eps1, state.eta1);
  c.phi4 = lin(state.eps2, state.eta2);
  return c;
}

double generalized_hamiltonian(const CanonicalState& state, const Worldline& w1,
                               const Worldline& w2, const ActionOptions& opts) {
  state.validate();
  auto part = [](const Worldline& w, const std::vector<FourVector>& p,
                 const std::vector<FourVector>& R, const std::vector<double>& P) {
    const auto wt = proper_time_weights(w);
    double h = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const FourVector d = p[k] - R[k];
      const double d2 = dot(d, d);
      if (!(d2 > 0.0)) throw SpacelikeMomentum("(p - R)^2 <= 0 at node " + std::to_string(k));
      if (P[k] < 0.0) throw SpacelikeMomentum("P_eps < 0 at node " + std::to_string(k));
      h += wt[k] * (-P[k] + std::sqrt(2.0 * P[k]) * std::sqrt(d2));
    }
    return h;
  };
  const double m1 = w1.mass(), m2 = w2.mass();
  return part(w1, state.p1, state.R1, state.P_eps1) + part(w2, state.p2, state.R2, state.P_eps2) +
         interaction_part(state, w1, w2, opts) - 0.5 * m1 * m1 * state.S1 -
         0.5 * m2 * m2 * state.S2;
}

SpinOperator generalized_hamiltonian_spinor(const CanonicalState& state, const Worldline& w1,
                                            const Worldline& w2, const ActionOptions& opts) {
  state.validate();
  SpinOperator h = SpinOperator::Zero(16, 16);
  double scalar = 0.0;
  auto part = [&](const Worldline& w, const std::vector<FourVector>& p,
                  const std::vector<FourVector>& R, const std::vector<double>& P, Slot slot) {
    const auto wt = proper_time_weights(w);
    FourVector lin;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (P[k] < 0.0) throw SpacelikeMomentum("P_eps < 0 at node " + std::to_string(k));
      scalar -= wt[k] * P[k];
      lin += (wt[k] * std::sqrt(2.0 * P[k])) * (p[k] - R[k]);
    }
    h += slash(lin, slot);
  };
  part(w1, state.p1, state.R1, state.P_eps1, Slot::first);
  part(w2, state.p2, state.R2, state.P_eps2, Slot::second);
  const double m1 = w1.mass(), m2 = w2.mass();
  scalar += interaction_part(state, w1, w2, opts) - 0.5 * m1 * m1 * state.S1 -
            0.5 * m2 * m2 * state.S2;
  h += scalar * identity(16);
  return h;
}

double canonical_action(const CanonicalState& state, const Worldline& w1, const Worldline& w2,
                        const ActionOptions& opts) {
  const double H = generalized_hamiltonian(state, w1, w2, opts);
  const Constraints c = constraints(state);
  auto part = [](const Worldline& w, const std::vector<FourVector>& p, const std::vector<double>& P,
                 const std::vector<double>& mu, const std::vector<double>& la,
                 const std::vector<double>& phia, const std::vector<double>& lb,
                 const std::vector<double>& phib) {
    const auto wt = proper_time_weights(w);
    const auto u = proper_velocities(w);
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
      s += wt[k] * (dot(p[k], u[k]) + P[k] * mu[k] + la[k] * phia[k] + lb[k] * phib[k]);
    return s;
  };
  return part(w1, state.p1, state.P_eps1, state.mu1, state.lambda1, c.phi1, state.lambda3, c.phi3) +
         part(w2, state.p2, state.P_eps2, state.mu2, state.lambda2, c.phi2, state.lambda4, c.phi4) -
         H;
}

void write_canonical_table(std::ostream& os, const CanonicalState& state, const Worldline& w,
                           Particle which) {
  state.validate();
  const bool first = which == Particle::first;
  const auto& p = first ? state.p1 : state.p2;
  const auto& R = first ? state.R1 : state.R2;
  const auto& P = first ? state.P_eps1 : state.P_eps2;
  const auto& eps = first ? state.eps1 : state.eps2;
  const auto& mu = first ? state.mu1 : state.mu2;
  const auto& eta = first ? state.eta1 : state.eta2;
  const auto& la = first ? state.lambda1 : state.lambda2;
  const auto& lb = first ? state.lambda3 : state.lambda4;
  require_size(w.size(), p.size(), "worldline");
  os << "# tau s p0 p1 p2 p3 R0 R1 R2 R3 P_eps eps mu eta lambda_a lambda_b\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << fmt_real(w.tau(k)) << ' ' << fmt_real(w.node_proper_time(k));
    for (int i = 0; i < 4; ++i) os << ' ' << fmt_real(p[k][i]);
    for (int i = 0; i < 4; ++i) os << ' ' << fmt_real(R[k][i]);
    os << ' ' << fmt_real(P[k]) << ' ' << fmt_real(eps[k]) << ' ' << fmt_real(mu[k]) << ' '
       << fmt_real(eta[k]) << ' ' << fmt_real(la[k]) << ' ' << fmt_real(lb[k]) << '\n';
  }
}

}  // namespace fokker
