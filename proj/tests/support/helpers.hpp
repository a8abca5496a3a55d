#pragma once

// Small builders shared by the unit suites.

#include <random>

#include "rclass/types.hpp"

namespace rclass::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// A rule with zero consequents, unit recurrence and all support in `cls`.
inline Rule make_rule(const Vector& centroid, const Matrix& inv_cov, int n_classes, int cls = 0,
                      double support = 1.0, std::uint64_t id = 1) {
  const auto u = centroid.size();
  Rule r;
  r.id = id;
  r.centroid = centroid;
  r.inv_cov = inv_cov;
  r.out_weights = Matrix::Zero(2 * u + 1, n_classes);
  r.out_cov = 1e5 * Matrix::Identity(2 * u + 1, 2 * u + 1);
  r.rec_weights = Vector::Ones(n_classes);
  r.prev_temporal = Vector::Zero(n_classes);
  r.support = support;
  r.class_support = Vector::Zero(n_classes);
  r.class_support[cls] = support;
  return r;
}

inline Rule make_rule(const Vector& centroid, double radius, int n_classes, int cls = 0,
                      double support = 1.0, std::uint64_t id = 1) {
  const auto u = centroid.size();
  return make_rule(centroid, Matrix::Identity(u, u) / (radius * radius), n_classes, cls, support,
                   id);
}

inline Vector random_vec(std::mt19937_64& rng, Eigen::Index n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double floor = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() + floor * Matrix::Identity(n, n);
}

}  // namespace rclass::testing
