#include "rclass/feature_weighting.hpp"

#include <algorithm>
#include <cmath>

#include "rclass/errors.hpp"

namespace rclass {

namespace {

constexpr double kFloor = 1e-12;

struct CostParts {
  double num = 0.0;
  double den = 0.0;
};

CostParts cost_parts(const FeatureWeightState& s, const Vector& omega) {
  CostParts p;
  const Vector abs_w = omega.cwiseAbs();
  for (std::size_t o = 0; o < s.class_means.size(); ++o) {
    if (s.class_counts[o] <= 0.0) continue;
    p.num += s.class_counts[o] * std::abs(omega.dot(s.class_means[o] - s.global_mean));
    p.den += abs_w.dot(s.scatter[o]);
  }
  return p;
}

int classes_seen(const FeatureWeightState& s) {
  int n = 0;
  for (double c : s.class_counts) n += c > 0.0 ? 1 : 0;
  return n;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void fda_ingest(FeatureWeightState& s, const Vector& x, int o, WithinScatter mode) {
  s.class_counts[o] += 1.0;
  s.total += 1.0;
  s.class_means[o] += (x - s.class_means[o]) / s.class_counts[o];
  s.global_mean += (x - s.global_mean) / s.total;
  const Vector& ref = mode == WithinScatter::ClassMean ? s.class_means[o] : s.global_mean;
  s.scatter[o] += (x - ref).cwiseAbs();
}

double fda_cost(const FeatureWeightState& s, const Vector& omega) {
  const CostParts p = cost_parts(s, omega);
  if (p.den < kFloor) throw ZeroWithinScatter();
  return p.num / p.den;
}

Vector fda_gradient(const FeatureWeightState& s, const Vector& omega) {
  const CostParts p = cost_parts(s, omega);
  if (p.den < kFloor) throw ZeroWithinScatter();
  Vector d_num = Vector::Zero(omega.size());
  Vector d_den = Vector::Zero(omega.size());
  const Vector sign_w = omega.unaryExpr([](double v) { return sgn(v); });
  for (std::size_t o = 0; o < s.class_means.size(); ++o) {
    if (s.class_counts[o] <= 0.0) continue;
    const Vector diff = s.class_means[o] - s.global_mean;
    d_num += s.class_counts[o] * sgn(omega.dot(diff)) * diff;
    d_den += sign_w.cwiseProduct(s.scatter[o]);
  }
  return d_num / p.den - (p.num / (p.den * p.den)) * d_den;
}

void fda_step(FeatureWeightState& s, double rate) {
  if (classes_seen(s) < 2) return;
  const CostParts p = cost_parts(s, s.omega);
  Vector next;
  if (p.den < kFloor || p.num < kFloor) {
    std::normal_distribution<double> noise(0.0, 1e-3);
    next = s.omega;
    for (Eigen::Index j = 0; j < next.size(); ++j) next[j] += noise(s.rng);
  } else {
    next = s.omega + rate * fda_gradient(s, s.omega);
  }
  const double n = next.norm();
  if (n > 0.0 && std::isfinite(n)) s.omega = next / n;
}

Vector lofo_weights(const FeatureWeightState& s) {
  const auto u = s.omega.size();
  Vector J(u);
  for (Eigen::Index j = 0; j < u; ++j) {
    Vector masked = s.omega;
    masked[j] = 0.0;
    const CostParts p = cost_parts(s, masked);
    J[j] = p.num / std::max(p.den, kFloor);
  }
  const double lo = J.minCoeff();
  const double hi = J.maxCoeff();
  if (!(hi - lo > 0.0)) return Vector::Ones(u);
  return (1.0 - (J.array() - lo) / (hi - lo)).matrix();
}

}  // namespace rclass
