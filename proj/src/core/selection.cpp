#include "rclass/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rclass/errors.hpp"
#include "rclass/inference.hpp"
#include "rclass/structure.hpp"

namespace rclass {

double output_conflict(const Vector& outputs) {
  const double shift = std::min(0.0, outputs.minCoeff());
  double y1 = -std::numeric_limits<double>::infinity();
  double y2 = -std::numeric_limits<double>::infinity();
  for (int o = 0; o < outputs.size(); ++o) {
    const double v = outputs[o] - shift;
    if (v > y1) {
      y2 = y1;
      y1 = v;
    } else if (v > y2) {
      y2 = v;
    }
  }
  if (!(y1 > 0.0)) throw DegenerateOutputs();
  return std::clamp(y1 / (y1 + y2), 0.0, 1.0);
}

Vector input_conflict(const ModelState& model, const Vector& x) {
  if (model.rules.empty()) throw EmptyModel();
  const int C = model.n_classes;
  const auto M = model.rules.size();
  const double u = static_cast<double>(model.n_features);

  double rule_log_sum = 0.0;
  for (const Rule& r : model.rules) rule_log_sum += std::log1p(r.support);

  // log-likelihoods first, then rescale by the largest so nothing underflows
  // before normalisation; the common factor cancels.
  std::vector<double> log_like(M);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < M; ++i) {
    const Rule& r = model.rules[i];
    const Eigen::LLT<Matrix> llt(r.inv_cov);
    if (llt.info() != Eigen::Success) {
      throw SingularCovariance("rule " + std::to_string(r.id) + " inverse covariance not PD");
    }
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Vector diff = x - r.centroid;
    const double d = diff.dot(r.inv_cov * diff);
    log_like[i] = -0.5 * u * std::log(2.0 * std::numbers::pi) + 0.5 * log_det - d;
    max_log = std::max(max_log, log_like[i]);
  }

  Vector post = Vector::Zero(C);
  for (std::size_t i = 0; i < M; ++i) {
    const Rule& r = model.rules[i];
    const double prior =
        rule_log_sum > 0.0 ? std::log1p(r.support) / rule_log_sum : 1.0 / static_cast<double>(M);
    double class_log_sum = 0.0;
    for (int o = 0; o < C; ++o) class_log_sum += std::log1p(r.class_support[o]);
    const double like = std::exp(log_like[i] - max_log);
    for (int o = 0; o < C; ++o) {
      const double class_prior = class_log_sum > 0.0
                                     ? std::log1p(r.class_support[o]) / class_log_sum
                                     : 1.0 / static_cast<double>(C);
      post[o] += class_prior * like * prior;
    }
  }
  const double total = post.sum();
  if (!(total > 0.0) || !std::isfinite(total)) return Vector::Constant(C, 1.0 / C);
  return post / total;
}

SelectionState update_budget(SelectionState state, bool labeled) {
  state.Z = state.Z * (state.window - 1.0) / state.window + (labeled ? 1.0 : 0.0);
  state.b = state.Z / state.window;
  ++state.n_queried;
  return state;
}

SelectionState update_threshold(SelectionState state, bool accepted, int n_classes) {
  state.theta *= accepted ? (1.0 - state.step) : (1.0 + state.step);
  state.theta = std::clamp(state.theta, 1.0 / static_cast<double>(n_classes), 1.0);
  return state;
}

double init_threshold(int n_classes, double budget) {
  const double inv = 1.0 / static_cast<double>(n_classes);
  return inv + budget * (1.0 - inv);
}

double imbalance_factor(const std::vector<double>& class_counts, double total) {
  if (total <= 0.0 || class_counts.empty()) return 0.0;
  const double least = *std::min_element(class_counts.begin(), class_counts.end());
  return 1.0 - static_cast<double>(class_counts.size()) / total * least;
}

namespace {

bool minority_override_counts(const std::vector<double>& counts, const HyperParams& config,
                              int n_classes, const Vector& input_posterior,
                              const Vector& outputs) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return false;
  if (imbalance_factor(counts, total) < config.imbalance_gate) return false;
  const int in_top = argmax_lowest(input_posterior);
  const int out_top = argmax_lowest(outputs);
  if (in_top != out_top) return false;
  const double balanced_share = total / static_cast<double>(n_classes);
  return counts[in_top] < config.minority_share * balanced_share;
}

}  // namespace

bool minority_override(const ModelState& model, const Vector& input_posterior,
                       const Vector& outputs) {
  return minority_override_counts(model.selection.class_counts, model.config, model.n_classes,
                                  input_posterior, outputs);
}

DecideResult decide(const ModelState& model, const SelectionState& state, const Vector& x) {
  DecideResult res{{}, state};
  Verdict& v = res.verdict;
  const bool budget_ok = state.b <= state.budget;

  int labeled_classes = 0;
  for (double c : state.class_counts) labeled_classes += c > 0.0 ? 1 : 0;

  if (model.rules.empty()) {
    v.cold_start = true;
    v.input_posterior = Vector::Constant(model.n_classes, 1.0 / model.n_classes);
    v.output_conf = 0.5;
    v.input_conf = 1.0 / model.n_classes;
  } else {
    const ForwardPass pass = forward(model, x);
    const Vector& outputs = pass.outputs;
    v.uncovered = pass.spatial.maxCoeff() <
                  coverage_threshold(model.n_features, model.config.chi2_alpha);
    try {
      v.output_conf = output_conflict(outputs);
    } catch (const DegenerateOutputs&) {
      v.output_conf = 0.5;
    }
    v.input_posterior = input_conflict(model, x);
    v.input_conf = v.input_posterior.maxCoeff();
    v.conflicted = v.output_conf < state.theta && v.input_conf < state.theta;
    v.override_fired = model.config.imbalance_override &&
                       minority_override_counts(state.class_counts, model.config,
                                                model.n_classes, v.input_posterior, outputs);
    // a rule base that has only ever seen one class is certain everywhere
    v.cold_start = labeled_classes < 2;
  }

  if (!budget_ok) {
    v.budget_blocked = true;
    return res;
  }
  if (v.cold_start) {
    v.query = true;
    return res;
  }
  // a sample outside every rule has no posterior support, so it counts as
  // conflicted
  const bool accept = v.conflicted || v.override_fired || v.uncovered;
  v.query = accept;
  res.next = update_threshold(state, accept, model.n_classes);
  return res;
}

}  // namespace rclass
