#pragma once

#include <string>

#include "fokker/kernels.hpp"
#include "fokker/lightcone.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

enum class Particle { first, second };

/// Parts of the (modified) two-particle Fokker action.
struct ActionBreakdown {
  double kinetic_1 = 0.0;
  double kinetic_2 = 0.0;
  double interaction_cross = 0.0;
  double interaction_self_1 = 0.0;
  double interaction_self_2 = 0.0;
  double modification = 0.0;
  double total = 0.0;

  double kinetic() const { return kinetic_1 + kinetic_2; }
  double interaction() const { return interaction_cross + interaction_self_1 + interaction_self_2; }
};

struct ActionOptions {
  /// Self-interaction roots with |tau - tau~| < self_cut_cells * step are
  /// dropped; self terms depend on this cut.
  double self_cut_cells = 2.0;
  Execution exec = Execution::parallel;
  LightconeTolerances tol;
};

/// 1/2 sum_c h (v_c^2 / N_c + m^2 N_c) over cells, v_c the cell slope and
/// N_c the cell-average lapse.
double kinetic_action(const Worldline& w);

/// sum_c h e_outer(s_c) * lightcone_sum(mid_c, v_c, partner), the outer
/// midpoint quadrature of the interaction double integral. With
/// `self_term` the partner is `outer` itself and the cut window applies.
double interaction_outer_sum(const Worldline& outer, const Worldline& partner, bool self_term,
                             const ActionOptions& opts = {});

/// Fokker action. The cross term is the average of the two outer-quadrature
/// orders, so the result is symmetric under relabeling the particles.
ActionBreakdown fokker_action(const Worldline& w1, const Worldline& w2,
                              const ActionOptions& opts = {});

/// Interaction density felt by one particle at parameter tau: self lightcone
/// sum plus cross lightcone sum, with the particle's velocity interpolated
/// from node velocities.
double w_functional(const Worldline& w1, const Worldline& w2, double tau, Particle which,
                    const ActionOptions& opts = {});

/// Same density at an explicit point and velocity of `self`, tau locating
/// the point for the self-interaction cut.
double w_functional_at(const Worldline& self, const Worldline& partner, const FourVector& x,
                       const FourVector& v, double tau, const ActionOptions& opts = {});

/// Fokker action plus the proper-time-shift terms:
///   1/2 sum h (v^2/N)(eps'/N)  +  sum h eps (de/ds) W   per particle.
ActionBreakdown modified_action(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                                const ShiftField& eps2, const ActionOptions& opts = {});

/// Charge-derivative part of the modification alone:
///   sum over particles of sum_c h eps_c (de/ds)(s_c) W(mid_c).
double charge_shift_action(const Worldline& w1, const Worldline& w2, const ShiftField& eps1,
                           const ShiftField& eps2, const ActionOptions& opts = {});

std::string action_csv_header();
std::string action_csv_row(const ActionBreakdown& a);

}  // namespace fokker
