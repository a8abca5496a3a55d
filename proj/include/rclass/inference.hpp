#pragma once

// Recurrent TSK inference: Chebyshev-expanded consequents, multivariate
// Gaussian premises with feature weights, local recurrence on the firing
// strength and a MIMO (one output per class) decision.

#include "rclass/types.hpp"

namespace rclass {

// [1, T1(x1), T2(x1), ..., T1(xu), T2(xu)] with T1(v) = v, T2(v) = 2v^2 - 1.
Vector chebyshev_expand(const Vector& x);

// Squared Mahalanobis distance of lambda o (x - C) under the rule's inverse
// covariance. Feature weights scale the displacement, so a feature with
// weight 0 drops out of the distance.
double weighted_mahalanobis_sq(const Rule& rule, const Vector& x, const Vector& lambda);

// exp(-d) with d from weighted_mahalanobis_sq. Throws CorruptRuleState if d
// is not a finite non-negative number.
double spatial_firing(const Rule& rule, const Vector& x, const Vector& lambda);

// gamma * spatial + (1 - gamma) * prev
inline double temporal_firing(double gamma, double spatial, double prev) {
  return gamma * spatial + (1.0 - gamma) * prev;
}

// Everything the learning path needs from one forward evaluation.
struct ForwardPass {
  Vector extended;   // 2u+1
  Vector spatial;    // M
  Matrix temporal;   // M x C
  Matrix local;      // M x C, x_e . W_{i,o}
  Vector denom;      // C, sum_i temporal(i,o)
  Vector outputs;    // C
  int winner = -1;   // rule with the highest spatial firing
  std::vector<bool> fallback;  // per class: zero-denominator guard used
};

// Pure: reads prev_temporal, never writes it. Throws EmptyModel.
ForwardPass forward(const ModelState& model, const Vector& x);

Vector predict_outputs(const ModelState& model, const Vector& x);

// argmax over classes, lowest index on ties.
int classify(const ModelState& model, const Vector& x);

int argmax_lowest(const Vector& v);

// Commits the temporal firing of a forward pass into prev_temporal.
void commit_temporal(ModelState& model, const ForwardPass& pass);

}  // namespace rclass
