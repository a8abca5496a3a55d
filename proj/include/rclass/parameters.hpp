#pragma once

// Parametric half of how-to-learn: fuzzily weighted RLS with weight decay for
// the consequents and zero-error-density maximisation for the recurrent
// weights.

#include "rclass/inference.hpp"
#include "rclass/types.hpp"

namespace rclass {

// One local RLS step on every class column of rule.out_weights, sharing the
// rule's covariance Psi:
//   K   = Psi x / (lambda / R + x' Psi x)
//   Psi = (Psi - K x' Psi) / lambda
//   W   = W - R c decay Psi W + K (t - x' W)
// with c = 1 / max(1, decay * ||Psi||) keeping the decay step contractive.
// Psi is re-symmetrised and its eigenvalues are floored at 1e-12 when needed.
void fwgrls_update(Rule& rule, const Vector& x_e, double firing, const Vector& targets,
                   double lambda, double decay);

// dE/dgamma_{i,o} for E = 0.5 sum_o (y_o - t_o)^2 at the given pass.
Vector zedm_gradient(const ForwardPass& pass, const ModelState& model, std::size_t rule,
                     const Vector& targets);

// 2 N sqrt(pi) M^2 / A
double lyapunov_eta_bound(double n, double m, double A);

// Parzen estimate of the error density at zero from the accumulator.
double parzen_f0(const ZedmState& state, double h);

// eta times lr_up if f0 did not fall, times lr_down otherwise; clamped below
// the Lyapunov bound. Records f0_now as f0_prev.
void adapt_eta(ZedmState& state, double f0_now, const HyperParams& config, double n_rules);

// Folds this sample's errors into A, adapts eta and moves gamma of `rule`
// along -gradient. gamma stays in [config.gamma_floor, 1].
void zedm_update(ModelState& model, const ForwardPass& pass, std::size_t rule,
                 const Vector& targets);

}  // namespace rclass
