#pragma once

// Plain data carried by the classifier. Operations live in the module
// headers (inference, selection, structure, parameters, feature_weighting,
// reserved_buffer); everything here is copyable so a ModelState snapshot can
// be handed to another thread.

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rclass {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct StreamSample {
  Vector x;
  std::optional<int> label;
  std::uint64_t index = 0;
};

// Welford accumulator over a scalar history. std() is the population
// standard deviation, so it is 0 for n_obs <= 1.
struct RunningStats {
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n_obs = 0;

  void push(double v);
  double std() const;
};

// Recursive potential of a rule (the P+ value) and its history.
struct PPlusStats {
  double value = 1.0;
  double prev_value = 1.0;
  RunningStats history;
  std::uint64_t n_obs = 0;  // number of recursion steps applied
  bool declining = false;   // last value fell below mean - std of the earlier history

  double running_mean() const { return history.mean; }
  double running_std() const { return history.std(); }
};

struct Rule {
  std::uint64_t id = 0;
  Vector centroid;         // u
  Matrix inv_cov;          // u x u, symmetric positive definite
  Matrix out_weights;      // (2u+1) x C, column o is the consequent of class o
  Vector rec_weights;      // C, each in [0,1]
  Matrix out_cov;          // (2u+1) x (2u+1)
  double support = 1.0;
  Vector class_support;    // C, sums to support
  Vector prev_temporal;    // C, temporal firing committed at the last learning step
  PPlusStats pplus;
  RunningStats ers;
  std::uint64_t age = 0;   // learning steps survived since creation

  int dominant_class() const;
};

enum class WithinScatter { ClassMean, GlobalMean };

struct HyperParams {
  // label budget and conflict threshold
  double budget = 0.5;
  double threshold_step = 0.05;
  double window = 100.0;
  double imbalance_gate = 0.3;
  double minority_share = 0.3;
  bool imbalance_override = true;

  // structure
  double split_tolerance = 0.8;
  double split_offset = 1.0;
  double chi2_alpha = 0.05;
  double initial_radius = 0.1;    // radius of the very first rule
  double nonoverlap_factor = 0.5; // fac for a rule placed away from all others
  double min_radius = 0.1;        // per-axis floor of a new rule's spread
  double max_radius = 0.5;        // per-axis ceiling of a new rule's spread
  double overlap_shift = 0.1;     // centroid shift away from the neighbouring rule
  std::uint64_t prune_grace = 30; // learning steps before a rule may be pruned

  // consequents
  double init_cov_big = 1e5;
  double decay_weight = 1e-3;
  double min_update_firing = 1e-4;

  // recurrent weights
  double gamma_init = 1.0;
  double gamma_floor = 0.5;       // lower clamp; near 0 a rule freezes its temporal firing
  double eta_init = 0.01;
  double parzen_h = 1.0;
  double lr_up = 1.1;
  double lr_down = 0.9;

  // feature weighting
  double fda_rate = 1e-3;
  WithinScatter within_scatter = WithinScatter::ClassMean;
  std::uint64_t seed = 42;

  std::size_t reserve_capacity = 1000;

  // Throws ConfigError when a field is outside its interval.
  void validate() const;
};

struct SelectionState {
  double theta = 1.0;
  double budget = 0.0;
  double Z = 0.0;
  double b = 0.0;
  double window = 100.0;
  double step = 0.05;
  std::vector<double> class_counts;
  std::uint64_t n_queried = 0;
};

struct DQState {
  double U = 0.0;
  // DQ-weighted first and second moments of past samples, kept free of the
  // inverse covariance so any candidate metric can be applied at evaluation.
  Vector moment1;
  Matrix moment2;
  double prev_dq = 1.0;
  Vector prev_x;
  std::uint64_t n = 0;
  bool clamped = false;  // last evaluation hit a non-positive radicand
};

struct ClassPotentialState {
  std::vector<double> cb;   // per class: accumulated squared norms
  std::vector<Vector> dd;   // per class: accumulated sample sums
  std::vector<double> count;
};

struct ZedmState {
  double A = 0.0;
  double eta = 0.01;
  double f0_prev = 0.0;
  std::uint64_t n = 0;
};

struct FeatureWeightState {
  Vector omega;
  std::vector<Vector> class_means;
  Vector global_mean;
  std::vector<Vector> scatter;
  std::vector<double> class_counts;
  double total = 0.0;
  Vector weights;
  std::uint64_t since_refresh = 0;
  std::mt19937_64 rng;
};

enum class ReserveReason { NoGrowNoAdapt };

struct ReservedSample {
  StreamSample sample;
  ReserveReason reason = ReserveReason::NoGrowNoAdapt;
  std::uint64_t stored_at = 0;
};

struct ReservedBuffer {
  std::deque<ReservedSample> items;
  std::size_t capacity = 1000;
  std::uint64_t evicted = 0;
};

struct ModelState {
  HyperParams config;
  int n_classes = 2;
  int n_features = 1;
  std::vector<Rule> rules;
  std::vector<Rule> archive;
  SelectionState selection;
  FeatureWeightState fweights;
  ZedmState zedm;
  DQState dq;
  ClassPotentialState class_potential;
  ReservedBuffer reserved;
  std::uint64_t n_seen = 0;
  std::uint64_t n_learned = 0;
  std::uint64_t next_rule_id = 1;

  // Fresh state for C classes and u features; validates config.
  static ModelState create(const HyperParams& config, int n_classes, int n_features);

  std::size_t extended_dim() const { return 2 * static_cast<std::size_t>(n_features) + 1; }
};

}  // namespace rclass
