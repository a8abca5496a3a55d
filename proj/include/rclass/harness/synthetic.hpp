#pragma once

// Seeded synthetic streams used by the acceptance runs and the `generate`
// CLI command. Features stay roughly inside [0,1].

#include <cstdint>
#include <vector>

#include "rclass/types.hpp"

namespace rclass::harness {

struct GaussianSpec {
  int n_classes = 4;
  int n_features = 4;
  double sigma = 0.05;
  std::vector<double> class_weights;  // empty: balanced
};

// Class centres drawn once from the seed, then i.i.d. labeled samples.
std::vector<StreamSample> gaussian_stream(std::size_t n, const GaussianSpec& spec,
                                          std::uint64_t seed);

// Fixed centres for concept A and concept B (4 classes, u = 4). The stream
// follows A, switches abruptly to B at drift_at, and returns to A at
// return_at (fractions of n).
std::vector<StreamSample> drifting_stream(std::size_t n, std::uint64_t seed,
                                          double drift_at = 0.5, double return_at = 0.8);

// 119 samples, 4 classes, 12 features: a stand-in for the tool-wear data.
std::vector<StreamSample> tool_wear_like(std::uint64_t seed);

// Two isotropic classes 0.3 apart along the first axis, with the given
// minority share and per-axis spread.
std::vector<StreamSample> imbalanced_stream(std::size_t n, double minority_share,
                                            std::uint64_t seed, double sigma = 0.1);

}  // namespace rclass::harness
