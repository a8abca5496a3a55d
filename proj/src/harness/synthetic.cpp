#include "rclass/harness/synthetic.hpp"

#include <algorithm>
#include <random>

#include "rclass/errors.hpp"

namespace rclass::harness {

namespace {

Vector draw(std::mt19937_64& rng, const Vector& centre, double sigma) {
  std::normal_distribution<double> noise(0.0, sigma);
  Vector x = centre;
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] += noise(rng);
  return x;
}

std::vector<StreamSample> sample_from(std::size_t n, const std::vector<Vector>& centres,
                                      const std::vector<double>& weights, double sigma,
                                      std::mt19937_64& rng, std::size_t first_index) {
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<StreamSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = pick(rng);
    out.push_back({draw(rng, centres[static_cast<std::size_t>(c)], sigma), c, first_index + i});
  }
  return out;
}

}  // namespace

std::vector<StreamSample> gaussian_stream(std::size_t n, const GaussianSpec& spec,
                                          std::uint64_t seed) {
  if (spec.n_classes < 2 || spec.n_features < 1) throw Error("bad synthetic spec");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.2, 0.8);
  std::vector<Vector> centres;
  // rejection sampling keeps centres at least 6 sigma apart
  while (static_cast<int>(centres.size()) < spec.n_classes) {
    Vector c(spec.n_features);
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = unit(rng);
    const bool far = std::all_of(centres.begin(), centres.end(), [&](const Vector& o) {
      return (o - c).norm() > 6.0 * spec.sigma;
    });
    if (far) centres.push_back(c);
  }
  std::vector<double> w = spec.class_weights;
  if (w.empty()) w.assign(static_cast<std::size_t>(spec.n_classes), 1.0);
  return sample_from(n, centres, w, spec.sigma, rng, 0);
}

std::vector<StreamSample> drifting_stream(std::size_t n, std::uint64_t seed, double drift_at,
                                          double return_at) {
  auto v4 = [](double a, double b, double c, double d) {
    Vector x(4);
    x << a, b, c, d;
    return x;
  };
  const std::vector<Vector> concept_a = {v4(0.2, 0.2, 0.3, 0.3), v4(0.8, 0.2, 0.3, 0.7),
                                         v4(0.2, 0.8, 0.7, 0.3), v4(0.8, 0.8, 0.7, 0.7)};
  // the same four classes relocated to unoccupied corners
  const std::vector<Vector> concept_b = {v4(0.5, 0.5, 0.9, 0.1), v4(0.5, 0.1, 0.1, 0.9),
                                         v4(0.1, 0.5, 0.1, 0.1), v4(0.9, 0.5, 0.9, 0.9)};
  const std::vector<double> w(4, 1.0);
  constexpr double sigma = 0.05;
  const auto a_end = static_cast<std::size_t>(drift_at * static_cast<double>(n));
  const auto b_end = static_cast<std::size_t>(return_at * static_cast<double>(n));

  std::mt19937_64 rng(seed);
  std::vector<StreamSample> out = sample_from(a_end, concept_a, w, sigma, rng, 0);
  auto mid = sample_from(b_end - a_end, concept_b, w, sigma, rng, a_end);
  auto tail = sample_from(n - b_end, concept_a, w, sigma, rng, b_end);
  out.insert(out.end(), mid.begin(), mid.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::vector<StreamSample> tool_wear_like(std::uint64_t seed) {
  GaussianSpec spec;
  spec.n_classes = 4;
  spec.n_features = 12;
  spec.sigma = 0.06;
  return gaussian_stream(119, spec, seed);
}

std::vector<StreamSample> imbalanced_stream(std::size_t n, double minority_share,
                                            std::uint64_t seed, double sigma) {
  Vector a(2), b(2);
  a << 0.35, 0.5;
  b << 0.65, 0.5;
  std::mt19937_64 rng(seed);
  return sample_from(n, {a, b}, {1.0 - minority_share, minority_share}, sigma, rng, 0);
}

}  // namespace rclass::harness
