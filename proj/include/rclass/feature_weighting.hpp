#pragma once

// Online L1 Fisher discriminant: a projection omega trained by gradient
// ascent, and leave-one-feature-out scores turned into soft feature weights.

#include "rclass/types.hpp"

namespace rclass {

// Recursive class and global means; the within-class scatter accumulator
// adds |x - m| where m is the (updated) class mean or the global mean,
// depending on config.within_scatter.
void fda_ingest(FeatureWeightState& state, const Vector& x, int o, WithinScatter mode);

// J(omega) = sum_o N_o |omega . (m_o - m)| / sum_o |omega| . S_o.
// Throws ZeroWithinScatter if the denominator is below 1e-12.
double fda_cost(const FeatureWeightState& state, const Vector& omega);

// Exact gradient of fda_cost away from sign kinks.
Vector fda_gradient(const FeatureWeightState& state, const Vector& omega);

// One ascent step at `rate`, then omega is renormalised to unit length. A
// degenerate denominator perturbs omega with the state's RNG instead.
// No-op until two classes have been seen.
void fda_step(FeatureWeightState& state, double rate);

// lambda_j = 1 - (J_j - min J) / (max J - min J) with J_j the cost after
// zeroing omega_j. All-equal scores give all ones.
Vector lofo_weights(const FeatureWeightState& state);

}  // namespace rclass
