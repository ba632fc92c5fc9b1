#include "fokker/action.hpp"

#include <vector>

#include "fokker/errors.hpp"
#include "fokker/format.hpp"

namespace fokker {

namespace {

FourVector cell_mid(const Worldline& w, std::size_t c) {
  return 0.5 * (w.point(c) + w.point(c + 1));
}

double sum_serial(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void finish(ActionBreakdown& a) {
  a.total = a.kinetic_1 + a.kinetic_2 + a.interaction_cross + a.interaction_self_1 +
            a.interaction_self_2 + a.modification;
}

// Shift-field term of one particle: sum_c h eps_c e'(s_c) W(mid_c).
double charge_shift_term(const Worldline& self, const Worldline& partner, const ShiftField& eps,
                         const ActionOptions& opts) {
  if (self.profile().switched_off()) return 0.0;
  const double h = self.step();
  std::vector<double> parts(self.cells(), 0.0);
  for_each_index(opts.exec, self.cells(), [&](std::size_t c) {
    const CellPoint mid{c, 0.5};
    const double de = self.profile().rate(self.proper_time_at(mid));
    const double e_c = 0.5 * (eps[c] + eps[c + 1]);
    if (de == 0.0 || e_c == 0.0) return;
    const double tau = (static_cast<double>(c) + 0.5) * h;
    parts[c] = h * e_c * de *
               w_functional_at(self, partner, cell_mid(self, c), self.cell_slope(c), tau, opts);
  });
  return sum_serial(parts);
}

double kinetic_shift_term(const Worldline& w, const ShiftField& eps) {
  const double h = w.step();
  const auto d = eps.tau_derivative(h);
  double s = 0.0;
  for (std::size_t c = 0; c < w.cells(); ++c) {
    const FourVector v = w.cell_slope(c);
    const double n = w.cell_lapse(c);
    const double de = 0.5 * (d[c] + d[c + 1]);
    s += h * 0.5 * dot(v, v) / n * (de / n);
  }
  return s;
}

}  // namespace

double kinetic_action(const Worldline& w) {
  const double h = w.step();
  const double m2 = w.mass() * w.mass();
  double s = 0.0;
  for (std::size_t c = 0; c < w.cells(); ++c) {
    const FourVector v = w.cell_slope(c);
    const double n = w.cell_lapse(c);
    s += h * 0.5 * (dot(v, v) / n + m2 * n);
  }
  return s;
}

double interaction_outer_sum(const Worldline& outer, const Worldline& partner, bool self_term,
                             const ActionOptions& opts) {
  if (outer.profile().switched_off() || partner.profile().switched_off()) return 0.0;
  const double h = outer.step();
  std::vector<double> parts(outer.cells(), 0.0);
  for_each_index(opts.exec, outer.cells(), [&](std::size_t c) {
    const double e = outer.charge_at({c, 0.5});
    if (e == 0.0) return;
    std::optional<TauWindow> cut;
    if (self_term)
      cut = self_window((static_cast<double>(c) + 0.5) * h, opts.self_cut_cells, h);
    parts[c] = h * e * lightcone_sum(cell_mid(outer, c), outer.cell_slope(c), partner, cut, opts.tol);
  });
  return sum_serial(parts);
}

ActionBreakdown fokker_action(const Worldline& w1, const Worldline& w2, const ActionOptions& opts) {
  ActionBreakdown a;
  a.kinetic_1 = kinetic_action(w1);
  a.kinetic_2 = kinetic_action(w2);
  a.interaction_cross = 0.5 * (interaction_outer_sum(w1, w2, false, opts) +
                               interaction_outer_sum(w2, w1, false, opts));
  a.interaction_self_1 = 0.5 * interaction_outer_sum(w1, w1, true, opts);
  a.interaction_self_2 = 0.5 * interaction_outer_sum(w2, w2, true, opts);
  finish(a);
  return a;
}

double w_functional_at(const Worldline& self, const Worldline& partner, const FourVector& x,
                       const FourVector& v, double tau, const ActionOptions& opts) {
  const auto cut = self_window(tau, opts.self_cut_cells, self.step());
  return lightcone_sum(x, v, self, cut, opts.tol) + lightcone_sum(x, v, partner, std::nullopt, opts.tol);
}

double w_functional(const Worldline& w1, const Worldline& w2, double tau, Particle which,
                    const ActionOptions& opts) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("w_functional: tau outside [0,1]");
  const Worldline& self = which == Particle::first ? w1 : w2;
  const Worldline& partner = which == Particle::first ? w2 : w1;
  const CellPoint p = self.locate(tau);
  const FourVector v = (1.0 - p.u) * velocity(self, p.cell) + p.u * velocity(self, p.cell + 1);
  return w_functional_at(self, partner, self.at(p), v, tau, opts);
}

ActionBreakdown modified_action(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                                const ShiftField& eps2, const ActionOptions& opts) {
  if (eps1.size() != w1.size() || eps2.size() != w2.size())
    throw ConfigError("shift field and worldline grids differ");
  ActionBreakdown a = fokker_action(w1, w2, opts);
  a.modification = kinetic_shift_term(w1, eps1) + kinetic_shift_term(w2, eps2) +
                   charge_shift_term(w1, w2, eps1, opts) + charge_shift_term(w2, w1, eps2, opts);
  finish(a);
  return a;
}

double charge_shift_action(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                           const ShiftField& eps2, const ActionOptions& opts) {
  if (eps1.size() != w1.size() || eps2.size() != w2.size())
    throw ConfigError("shift field and worldline grids differ");
  return charge_shift_term(w1, w2, eps1, opts) + charge_shift_term(w2, w1, eps2, opts);
}

std::string action_csv_header() {
  return "kinetic_1,kinetic_2,interaction_cross,interaction_self_1,interaction_self_2,"
         "modification,total";
}

std::string action_csv_row(const ActionBreakdown& a) {
  return fmt_real(a.kinetic_1) + ',' + fmt_real(a.kinetic_2) + ',' + fmt_real(a.interaction_cross) +
         ',' + fmt_real(a.interaction_self_1) + ',' + fmt_real(a.interaction_self_2) + ',' +
         fmt_real(a.modification) + ',' + fmt_real(a.total);
}

}  // namespace fokker
