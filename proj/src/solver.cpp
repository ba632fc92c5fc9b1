#include "fokker/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "fokker/errors.hpp"
#include "fokker/format.hpp"
#include "fokker/kernels.hpp"

namespace fokker {

namespace {

// Derivative entry produced by one outer cell. kind 0..3: x component,
// 4: lapse at `node`, 5: coefficient of d s_node / dN (the cumulative proper
// time at node `node`), expanded after the reduction.
struct Entry {
  std::uint8_t particle;
  std::uint8_t kind;
  std::uint32_t node;
  double value;
};

struct Sink {
  std::vector<Entry>& out;
  void x(int p, std::size_t k, const FourVector& g) {
    for (int mu = 0; mu < 4; ++mu)
      if (g[mu] != 0.0)
        out.push_back({static_cast<std::uint8_t>(p), static_cast<std::uint8_t>(mu),
                       static_cast<std::uint32_t>(k), g[mu]});
  }
  void n(int p, std::size_t k, double v) {
    if (v != 0.0) out.push_back({static_cast<std::uint8_t>(p), 4, static_cast<std::uint32_t>(k), v});
  }
  void cum(int p, std::size_t k, double v) {
    if (v != 0.0) out.push_back({static_cast<std::uint8_t>(p), 5, static_cast<std::uint32_t>(k), v});
  }
};

double contract(const FourVector& co, const FourVector& v) {
  return co[0] * v[0] + co[1] * v[1] + co[2] * v[2] + co[3] * v[3];
}

// Node velocity k as a combination of points.
void velocity_stencil(Sink& sink, int p, const Worldline& w, std::size_t k, const FourVector& g) {
  const std::size_t n = w.size();
  const double a = 1.0 / (2.0 * w.step());
  if (k == 0) {
    sink.x(p, 0, -3.0 * a * g);
    sink.x(p, 1, 4.0 * a * g);
    sink.x(p, 2, -a * g);
  } else if (k == n - 1) {
    sink.x(p, n - 1, 3.0 * a * g);
    sink.x(p, n - 2, -4.0 * a * g);
    sink.x(p, n - 3, a * g);
  } else {
    sink.x(p, k + 1, a * g);
    sink.x(p, k - 1, -a * g);
  }
}

// d/dN of the proper time at (cell, u), u held fixed.
void proper_time_stencil(Sink& sink, int p, const Worldline& w, CellPoint at, double g) {
  const double h = w.step();
  sink.cum(p, at.cell, g);
  sink.n(p, at.cell, g * h * at.u * (1.0 - 0.5 * at.u));
  sink.n(p, at.cell + 1, g * h * 0.5 * at.u * at.u);
}

// One outer cell of interaction_outer_sum, scaled by coef.
void outer_cell_gradient(Sink& sink, const Worldline& outer, int po, const Worldline& partner,
                         int pp, bool self_term, std::size_t c, double coef,
                         const ActionOptions& opts) {
  const double h = outer.step();
  const CellPoint mid{c, 0.5};
  const double sigma = outer.proper_time_at(mid);
  const double eo = outer.profile().charge(sigma);
  const double eo_rate = outer.profile().rate(sigma);
  if (eo == 0.0 && eo_rate == 0.0) return;
  std::optional<TauWindow> cut;
  if (self_term) cut = self_window((static_cast<double>(c) + 0.5) * h, opts.self_cut_cells, h);

  const FourVector x = 0.5 * (outer.point(c) + outer.point(c + 1));
  const FourVector v = outer.cell_slope(c);
  const double A = coef * h * eo;
  double qsum = 0.0;
  for (const auto& r : find_crossings(x, partner, cut, opts.tol)) {
    const std::size_t d = r.where.cell;
    const double u = r.where.u;
    const double s = partner.proper_time_at(r.where);
    const double ep = partner.profile().charge(s);
    const double ep_rate = partner.profile().rate(s);
    if (ep == 0.0 && ep_rate == 0.0) continue;
    const FourVector delta = partner.cell_delta(d);
    const FourVector z = x - partner.at(r.where);
    const FourVector& t = r.tangent;
    const FourVector dt_du = velocity(partner, d + 1) - velocity(partner, d);
    const double g = -2.0 * dot(z, t);
    const double w = 1.0 / std::abs(g);
    const double vt = dot(v, t);
    qsum += ep * w * vt;
    if (A == 0.0) continue;

    const double dq_dg = -ep * vt * w / g;
    const FourVector dq_dt = ep * w * lower(v) - 2.0 * dq_dg * lower(z);
    const FourVector dq_dz = -2.0 * dq_dg * lower(t);
    const double dq_ds = ep_rate * w * vt;
    const FourVector dq_dv = ep * w * lower(t);
    const double dq_du = -contract(dq_dz, delta) + contract(dq_dt, dt_du) +
                         dq_ds * h * partner.lapse_at(r.where);
    const double f_u = -2.0 * dot(z, delta);
    const FourVector Z = A * (dq_dz - (2.0 * dq_du / f_u) * lower(z));

    sink.x(po, c, 0.5 * Z);
    sink.x(po, c + 1, 0.5 * Z);
    sink.x(pp, d, -(1.0 - u) * Z);
    sink.x(pp, d + 1, -u * Z);
    velocity_stencil(sink, pp, partner, d, A * (1.0 - u) * dq_dt);
    velocity_stencil(sink, pp, partner, d + 1, A * u * dq_dt);
    sink.x(po, c + 1, (A / h) * dq_dv);
    sink.x(po, c, -(A / h) * dq_dv);
    proper_time_stencil(sink, pp, partner, r.where, A * dq_ds);
  }
  if (eo_rate != 0.0) proper_time_stencil(sink, po, outer, mid, coef * h * eo_rate * qsum);
}

void kinetic_gradient(const Worldline& w, std::vector<FourVector>& gx, std::vector<double>& gn) {
  const double h = w.step();
  const double m2 = w.mass() * w.mass();
  for (std::size_t c = 0; c < w.cells(); ++c) {
    const FourVector v = w.cell_slope(c);
    const double n = w.cell_lapse(c);
    const FourVector g = lower(v) / n;
    gx[c + 1] += g;
    gx[c] -= g;
    const double dn = 0.25 * h * (m2 - dot(v, v) / (n * n));
    gn[c] += dn;
    gn[c + 1] += dn;
  }
}

double extent(const Worldline& w) {
  return std::max(component_norm(w.point(w.size() - 1) - w.point(0)), 1e-300);
}

}  // namespace

ActionGradient action_gradient(const Worldline& w1, const Worldline& w2,
                               const ActionOptions& opts) {
  ActionGradient g;
  g.x1.assign(w1.size(), FourVector{});
  g.x2.assign(w2.size(), FourVector{});
  g.N1.assign(w1.size(), 0.0);
  g.N2.assign(w2.size(), 0.0);
  kinetic_gradient(w1, g.x1, g.N1);
  kinetic_gradient(w2, g.x2, g.N2);

  const bool on1 = !w1.profile().switched_off();
  const bool on2 = !w2.profile().switched_off();
  // Tasks: outer cells of J(1<-2), J(2<-1), self 1, self 2.
  struct Task {
    const Worldline* outer;
    int po;
    const Worldline* partner;
    int pp;
    bool self;
    std::size_t cell;
  };
  std::vector<Task> tasks;
  if (on1 && on2) {
    for (std::size_t c = 0; c < w1.cells(); ++c) tasks.push_back({&w1, 0, &w2, 1, false, c});
    for (std::size_t c = 0; c < w2.cells(); ++c) tasks.push_back({&w2, 1, &w1, 0, false, c});
  }
  if (on1)
    for (std::size_t c = 0; c < w1.cells(); ++c) tasks.push_back({&w1, 0, &w1, 0, true, c});
  if (on2)
    for (std::size_t c = 0; c < w2.cells(); ++c) tasks.push_back({&w2, 1, &w2, 1, true, c});

  std::vector<std::vector<Entry>> parts(tasks.size());
  for_each_index(opts.exec, tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    Sink sink{parts[i]};
    outer_cell_gradient(sink, *t.outer, t.po, *t.partner, t.pp, t.self, t.cell, 0.5, opts);
  });

  std::vector<double> cum1(w1.size(), 0.0), cum2(w2.size(), 0.0);
  for (const auto& part : parts)
    for (const Entry& e : part) {
      auto& gx = e.particle == 0 ? g.x1 : g.x2;
      auto& gn = e.particle == 0 ? g.N1 : g.N2;
      auto& cum = e.particle == 0 ? cum1 : cum2;
      if (e.kind < 4)
        gx[e.node][e.kind] += e.value;
      else if (e.kind == 4)
        gn[e.node] += e.value;
      else
        cum[e.node] += e.value;
    }
  // s_d = h/2 sum_{i<d} (N_i + N_{i+1}): dN_j collects suffix sums.
  auto expand = [](const Worldline& w, const std::vector<double>& cum, std::vector<double>& gn) {
    const std::size_t n = w.size();
    const double h = w.step();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t d = n; d-- > 0;) suffix[d] = suffix[d + 1] + cum[d];
    for (std::size_t j = 0; j < n; ++j) {
      double c = suffix[j + 1];
      if (j >= 1) c += suffix[j];
      gn[j] += 0.5 * h * c;
    }
  };
  expand(w1, cum1, g.N1);
  expand(w2, cum2, g.N2);
  return g;
}

Worldline gauge_fixed(const Worldline& w) {
  double sum = 0.0;
  for (std::size_t c = 0; c < w.cells(); ++c) {
    const FourVector v = w.cell_slope(c);
    sum += w.step() * dot(v, v);
  }
  if (!(sum > 0.0)) throw DomainError("gauge_fixed: worldline is not timelike on average");
  return w.with_lapse(std::vector<double>(w.size(), std::sqrt(sum) / w.mass()));
}

double gradient_norm(const ActionGradient& g, bool use1, bool use2) {
  double m = 0.0;
  auto scan = [&](const std::vector<FourVector>& gx) {
    for (std::size_t k = 1; k + 1 < gx.size(); ++k)
      for (int mu = 0; mu < 4; ++mu) m = std::max(m, std::abs(gx[k][mu]));
  };
  if (use1) scan(g.x1);
  if (use2) scan(g.x2);
  return m;
}

namespace {

struct Unknowns {
  bool use1, use2;
  std::size_t n1, n2;  // interior nodes
  std::size_t size() const { return 4 * ((use1 ? n1 : 0) + (use2 ? n2 : 0)); }
};

Eigen::VectorXd pack_gradient(const ActionGradient& g, const Unknowns& u) {
  Eigen::VectorXd r(u.size());
  Eigen::Index i = 0;
  auto put = [&](const std::vector<FourVector>& gx) {
    for (std::size_t k = 1; k + 1 < gx.size(); ++k)
      for (int mu = 0; mu < 4; ++mu) r(i++) = gx[k][mu];
  };
  if (u.use1) put(g.x1);
  if (u.use2) put(g.x2);
  return r;
}

std::pair<Worldline, Worldline> displaced(const Worldline& w1, const Worldline& w2,
                                          const Unknowns& u, const Eigen::VectorXd& step) {
  Eigen::Index i = 0;
  auto move = [&](const Worldline& w) {
    auto pts = w.points();
    for (std::size_t k = 1; k + 1 < pts.size(); ++k)
      for (int mu = 0; mu < 4; ++mu) pts[k][mu] += step(i++);
    return w.with_points(std::move(pts));
  };
  Worldline a = u.use1 ? move(w1) : w1;
  Worldline b = u.use2 ? move(w2) : w2;
  return {std::move(a), std::move(b)};
}

}  // namespace

StationaryReport find_stationary(const Worldline& w1_init, const Worldline& w2_init,
                                 const SolverOptions& opts) {
  const Unknowns u{!opts.freeze1, !opts.freeze2, w1_init.size() - 2, w2_init.size() - 2};
  Worldline w1 = opts.freeze1 ? w1_init : gauge_fixed(w1_init);
  Worldline w2 = opts.freeze2 ? w2_init : gauge_fixed(w2_init);
  auto refix = [&](std::pair<Worldline, Worldline> p) {
    if (u.use1) p.first = gauge_fixed(p.first);
    if (u.use2) p.second = gauge_fixed(p.second);
    return p;
  };

  double scale = 0.0;
  if (u.use1) scale = std::max(scale, std::abs(kinetic_action(w1)));
  if (u.use2) scale = std::max(scale, std::abs(kinetic_action(w2)));
  scale = std::max(scale, 1.0);
  double cap = 0.0;
  if (u.use1) cap = std::max(cap, extent(w1));
  if (u.use2) cap = std::max(cap, extent(w2));
  cap *= opts.max_step;

  StationaryReport rep{w1, w2, 0.0, 0.0, 0, {}, false};
  rep.tolerance = opts.tol_grad * scale;
  Eigen::VectorXd r = pack_gradient(action_gradient(w1, w2, opts.action), u);
  double rnorm = u.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  int it = 0;
  double damping = 0.0;
  for (; it < opts.max_iterations && rnorm > rep.tolerance; ++it) {
    // Jacobian of the gauge-fixed gradient by central differences.
    const Eigen::Index n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd J(n, n);
    const double hstep = opts.jacobian_step * cap / opts.max_step;
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(j) = hstep;
      const auto [a1, a2] = refix(displaced(w1, w2, u, e));
      const auto [b1, b2] = refix(displaced(w1, w2, u, -e));
      J.col(j) = (pack_gradient(action_gradient(a1, a2, opts.action), u) -
                  pack_gradient(action_gradient(b1, b2, opts.action), u)) /
                 (2.0 * hstep);
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      Eigen::VectorXd step;
      if (damping == 0.0) {
        step = -J.colPivHouseholderQr().solve(r);
      } else {
        Eigen::MatrixXd M = J.transpose() * J;
        M.diagonal().array() += damping * M.diagonal().maxCoeff();
        step = -M.ldlt().solve(J.transpose() * r);
      }
      const double big = step.cwiseAbs().maxCoeff();
      if (!std::isfinite(big)) {
        damping = std::max(1e-6, damping * 10.0);
        continue;
      }
      if (big > cap) step *= cap / big;
      // Armijo on |r|^2 along the step; give up early and damp instead.
      const double r2 = r.squaredNorm();
      double t = 1.0;
      for (int ls = 0; ls < 6 && !accepted; ++ls, t *= 0.5) {
        try {
          auto trial = refix(displaced(w1, w2, u, t * step));
          Eigen::VectorXd rt =
              pack_gradient(action_gradient(trial.first, trial.second, opts.action), u);
          if (rt.squaredNorm() <= (1.0 - 1e-4 * t) * r2) {
            w1 = std::move(trial.first);
            w2 = std::move(trial.second);
            r = std::move(rt);
            rnorm = r.cwiseAbs().maxCoeff();
            accepted = true;
          }
        } catch (const NumericalError&) {
        } catch (const DomainError&) {
        }
      }
      if (accepted)
        damping = damping < 1e-6 ? 0.0 : damping * 0.1;
      else
        damping = std::max(1e-6, damping * 10.0);
    }
    if (!accepted) break;
  }
  rep.w1 = w1;
  rep.w2 = w2;
  rep.iterations = it;
  rep.gradient_norm = rnorm;
  rep.converged = rnorm <= rep.tolerance;
  rep.action = fokker_action(w1, w2, opts.action);
  return rep;
}

std::string stationary_csv_header() {
  return "converged,iterations,gradient_norm,tolerance," + action_csv_header();
}

std::string stationary_csv_row(const StationaryReport& r) {
  return std::string(r.converged ? "1" : "0") + ',' + std::to_string(r.iterations) + ',' +
         fmt_real(r.gradient_norm) + ',' + fmt_real(r.tolerance) + ',' + action_csv_row(r.action);
}

}  // namespace fokker
