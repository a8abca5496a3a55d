#include "rclass/inference.hpp"

#include <cmath>
#include <limits>

#include "rclass/errors.hpp"
#include "rclass/kernels.hpp"

namespace rclass {

namespace {
constexpr double kDenominatorFloor = 1e-12;
}

Vector chebyshev_expand(const Vector& x) {
  Vector out(2 * x.size() + 1);
  kernels::active().chebyshev2(x.data(), static_cast<std::size_t>(x.size()), out.data());
  return out;
}

double weighted_mahalanobis_sq(const Rule& rule, const Vector& x, const Vector& lambda) {
  const auto n = static_cast<std::size_t>(x.size());
  Vector diff(x.size());
  const auto& k = kernels::active();
  k.weighted_diff(x.data(), rule.centroid.data(), lambda.data(), diff.data(), n);
  return k.quad_form_sym(rule.inv_cov.data(), diff.data(), n);
}

double spatial_firing(const Rule& rule, const Vector& x, const Vector& lambda) {
  const double d = weighted_mahalanobis_sq(rule, x, lambda);
  // A PD inverse covariance cannot give a negative form beyond rounding.
  if (!std::isfinite(d) || d < -1e-9) {
    throw CorruptRuleState("rule " + std::to_string(rule.id) + " produced distance " +
                           std::to_string(d));
  }
  return std::exp(-std::max(d, 0.0));
}

int argmax_lowest(const Vector& v) {
  int best = 0;
  for (int o = 1; o < v.size(); ++o) {
    if (v[o] > v[best]) best = o;
  }
  return best;
}

ForwardPass forward(const ModelState& model, const Vector& x) {
  if (model.rules.empty()) throw EmptyModel();
  const auto M = static_cast<Eigen::Index>(model.rules.size());
  const int C = model.n_classes;
  const Vector& lambda = model.fweights.weights;

  ForwardPass pass;
  pass.extended = chebyshev_expand(x);
  pass.spatial.resize(M);
  pass.temporal.resize(M, C);
  pass.local.resize(M, C);
  pass.denom = Vector::Zero(C);
  pass.outputs = Vector::Zero(C);
  pass.fallback.assign(C, false);

  double best = -1.0;
  for (Eigen::Index i = 0; i < M; ++i) {
    const Rule& r = model.rules[i];
    const double R = spatial_firing(r, x, lambda);
    pass.spatial[i] = R;
    if (R > best) {
      best = R;
      pass.winner = static_cast<int>(i);
    }
    pass.local.row(i) = pass.extended.transpose() * r.out_weights;
    for (int o = 0; o < C; ++o) {
      pass.temporal(i, o) = temporal_firing(r.rec_weights[o], R, r.prev_temporal[o]);
    }
  }

  for (int o = 0; o < C; ++o) {
    const double den = pass.temporal.col(o).sum();
    pass.denom[o] = den;
    if (den < kDenominatorFloor) {
      pass.outputs[o] = pass.local(pass.winner, o);
      pass.fallback[o] = true;
    } else {
      pass.outputs[o] = pass.temporal.col(o).dot(pass.local.col(o)) / den;
    }
  }
  return pass;
}

Vector predict_outputs(const ModelState& model, const Vector& x) {
  return forward(model, x).outputs;
}

int classify(const ModelState& model, const Vector& x) {
  return argmax_lowest(predict_outputs(model, x));
}

void commit_temporal(ModelState& model, const ForwardPass& pass) {
  for (std::size_t i = 0; i < model.rules.size(); ++i) {
    model.rules[i].prev_temporal = pass.temporal.row(static_cast<Eigen::Index>(i)).transpose();
  }
}

}  // namespace rclass
