#include "rclass/types.hpp"

#include <cmath>

#include "rclass/errors.hpp"

namespace rclass {

void RunningStats::push(double v) {
  ++n_obs;
  const double delta = v - mean;
  mean += delta / static_cast<double>(n_obs);
  m2 += delta * (v - mean);
}

double RunningStats::std() const {
  if (n_obs <= 1) return 0.0;
  return std::sqrt(std::max(0.0, m2 / static_cast<double>(n_obs)));
}

int Rule::dominant_class() const {
  int best = 0;
  for (int o = 1; o < class_support.size(); ++o) {
    if (class_support[o] > class_support[best]) best = o;
  }
  return best;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("hyperparameter out of range: ") + what);
}

}  // namespace

void HyperParams::validate() const {
  require(budget >= 0.0 && budget <= 1.0, "budget in [0,1]");
  require(threshold_step > 0.0 && threshold_step < 1.0, "threshold_step in (0,1)");
  require(window >= 1.0, "window >= 1");
  require(imbalance_gate >= 0.0 && imbalance_gate <= 1.0, "imbalance_gate in [0,1]");
  require(minority_share > 0.0 && minority_share <= 1.0, "minority_share in (0,1]");
  require(split_tolerance >= 0.5 && split_tolerance <= 0.9, "split_tolerance in [0.5,0.9]");
  require(split_offset > 0.0, "split_offset > 0");
  require(chi2_alpha > 0.0 && chi2_alpha < 1.0, "chi2_alpha in (0,1)");
  require(initial_radius > 0.0, "initial_radius > 0");
  require(nonoverlap_factor > 0.0, "nonoverlap_factor > 0");
  require(min_radius > 0.0 && min_radius <= max_radius, "0 < min_radius <= max_radius");
  require(overlap_shift >= 0.0 && overlap_shift < 1.0, "overlap_shift in [0,1)");
  require(init_cov_big > 0.0, "init_cov_big > 0");
  require(decay_weight >= 0.0, "decay_weight >= 0");
  require(min_update_firing >= 0.0 && min_update_firing < 1.0, "min_update_firing in [0,1)");
  require(gamma_init >= 0.0 && gamma_init <= 1.0, "gamma_init in [0,1]");
  require(gamma_floor >= 0.0 && gamma_floor <= gamma_init, "gamma_floor in [0,gamma_init]");
  require(eta_init > 0.0, "eta_init > 0");
  require(parzen_h > 0.0, "parzen_h > 0");
  require(lr_up > 1.0 && lr_up <= 1.5, "lr_up in (1,1.5]");
  require(lr_down >= 0.5 && lr_down < 1.0, "lr_down in [0.5,1)");
  require(fda_rate > 0.0, "fda_rate > 0");
  require(reserve_capacity >= 1, "reserve_capacity >= 1");
}

ModelState ModelState::create(const HyperParams& config, int n_classes, int n_features) {
  config.validate();
  if (n_classes < 2) throw ConfigError("at least two classes are required");
  if (n_features < 1) throw ConfigError("at least one feature is required");

  ModelState m;
  m.config = config;
  m.n_classes = n_classes;
  m.n_features = n_features;

  const double c = static_cast<double>(n_classes);
  m.selection.budget = config.budget;
  m.selection.window = config.window;
  m.selection.step = config.threshold_step;
  m.selection.theta = 1.0 / c + config.budget * (1.0 - 1.0 / c);
  m.selection.class_counts.assign(n_classes, 0.0);

  const Vector zero_u = Vector::Zero(n_features);
  auto& fw = m.fweights;
  fw.omega = Vector::Ones(n_features) / std::sqrt(static_cast<double>(n_features));
  fw.class_means.assign(n_classes, zero_u);
  fw.global_mean = zero_u;
  fw.scatter.assign(n_classes, zero_u);
  fw.class_counts.assign(n_classes, 0.0);
  fw.weights = Vector::Ones(n_features);
  fw.rng.seed(config.seed);

  m.zedm.eta = config.eta_init;

  m.dq.moment1 = zero_u;
  m.dq.moment2 = Matrix::Zero(n_features, n_features);
  m.dq.prev_x = zero_u;

  m.class_potential.cb.assign(n_classes, 0.0);
  m.class_potential.dd.assign(n_classes, zero_u);
  m.class_potential.count.assign(n_classes, 0.0);

  m.reserved.capacity = config.reserve_capacity;
  return m;
}

}  // namespace rclass
