#include "rclass/learner.hpp"

#include <algorithm>
#include <limits>

#include "rclass/errors.hpp"
#include "rclass/feature_weighting.hpp"
#include "rclass/inference.hpp"
#include "rclass/parameters.hpp"
#include "rclass/reserved_buffer.hpp"

namespace rclass {

const char* event_name(EventType t) {
  switch (t) {
    case EventType::Grow: return "grow";
    case EventType::Prune: return "prune";
    case EventType::Merge: return "merge";
    case EventType::Split: return "split";
    case EventType::Recall: return "recall";
  }
  return "unknown";
}

namespace {

std::size_t index_of(const std::vector<Rule>& rules, std::uint64_t id) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].id == id) return i;
  }
  return rules.size();
}

std::size_t nearest_other(const std::vector<Rule>& rules, std::size_t from) {
  std::size_t best = rules.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i == from) continue;
    const double d = (rules[i].centroid - rules[from].centroid).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

Classifier::Classifier(const HyperParams& config, int n_classes, int n_features)
    : model_(ModelState::create(config, n_classes, n_features)) {}

Classifier::Classifier(ModelState state) : model_(std::move(state)) {}

Vector Classifier::predict(const Vector& x) const { return predict_outputs(model_, x); }

int Classifier::classify(const Vector& x) const { return rclass::classify(model_, x); }

Verdict Classifier::decide(const Vector& x) {
  ++model_.n_seen;
  DecideResult r = rclass::decide(model_, model_.selection, x);
  model_.selection = std::move(r.next);
  return std::move(r.verdict);
}

void Classifier::record_label_outcome(bool labeled) {
  model_.selection = update_budget(model_.selection, labeled);
}

void Classifier::emit(EventType t, std::uint64_t index, std::uint64_t id, std::uint64_t other) {
  events_.push_back({t, index, id, other});
}

LearnOutcome Classifier::learn(const StreamSample& sample) {
  if (!sample.label) throw Error("learn() needs a labeled sample");
  const int label = *sample.label;
  if (label < 0 || label >= model_.n_classes) throw Error("label out of range");
  if (sample.x.size() != model_.n_features) throw Error("feature count mismatch");

  const HyperParams& cfg = model_.config;
  FeatureWeightState& fw = model_.fweights;
  fda_ingest(fw, sample.x, label, cfg.within_scatter);
  fda_step(fw, cfg.fda_rate);
  if (++fw.since_refresh >= static_cast<std::uint64_t>(cfg.window)) {
    fw.weights = lofo_weights(fw);
    fw.since_refresh = 0;
  }
  model_.selection.class_counts[label] += 1.0;
  ++model_.n_learned;

  LearnOutcome out = pipeline(sample.x, label, sample.index);
  if (out.decision == GrowDecision::Reserve) {
    reserve(model_.reserved, sample, sample.index);
    out.reserved = true;
  }
  return out;
}

std::size_t Classifier::replay() {
  std::size_t consumed = 0;
  while (!model_.reserved.items.empty()) {
    const ReservedSample item = take_oldest(model_.reserved);
    pipeline(item.sample.x, *item.sample.label, item.sample.index);
    ++consumed;
  }
  return consumed;
}

LearnOutcome Classifier::pipeline(const Vector& x, int label, std::uint64_t index) {
  const HyperParams& cfg = model_.config;
  const std::size_t events_before = events_.size();
  LearnOutcome out;

  GrowAssessment g = grow_decision(model_, x, label);
  out.decision = g.decision;
  if (g.decision == GrowDecision::Reserve) return out;

  std::uint64_t winner_id = 0;
  if (g.decision == GrowDecision::Grow) {
    g.candidate.id = model_.next_rule_id++;
    winner_id = g.candidate.id;
    model_.rules.push_back(std::move(g.candidate));
    emit(EventType::Grow, index, winner_id);
  } else {
    const auto w = static_cast<std::size_t>(g.winner);
    adapt_winner(model_.rules[w], x, label);
    winner_id = model_.rules[w].id;
    if (auto children = split_check(model_, w)) {
      auto& [a, b] = *children;
      model_.next_rule_id += 2;
      const std::uint64_t parent = winner_id;
      winner_id = (a.centroid - x).squaredNorm() <= (b.centroid - x).squaredNorm() ? a.id : b.id;
      emit(EventType::Split, index, parent, a.id);
      model_.rules[w] = std::move(a);
      model_.rules.push_back(std::move(b));
    }
  }

  class_potential_ingest(model_.class_potential, x, label);

  const Vector& lambda_w = model_.fweights.weights;
  for (Rule& r : model_.rules) pplus_update(r, x, lambda_w);
  for (Rule& r : model_.archive) pplus_update(r, x, lambda_w);

  std::vector<double> forget(model_.rules.size());
  for (std::size_t i = 0; i < model_.rules.size(); ++i) {
    forget[i] = std::min(1.0, forgetting_update(model_.rules[i]).lambda);
  }

  Vector targets = Vector::Zero(model_.n_classes);
  targets[label] = 1.0;
  {
    const ForwardPass pass = forward(model_, x);
    for (std::size_t i = 0; i < model_.rules.size(); ++i) {
      const double R = pass.spatial[static_cast<Eigen::Index>(i)];
      if (R < cfg.min_update_firing) continue;
      fwgrls_update(model_.rules[i], pass.extended, R, targets, forget[i], cfg.decay_weight);
    }
  }
  {
    const ForwardPass pass = forward(model_, x);
    zedm_update(model_, pass, static_cast<std::size_t>(pass.winner), targets);
  }
  commit_temporal(model_, forward(model_, x));

  for (Rule& r : model_.rules) ++r.age;

  std::vector<std::uint64_t> archived_now;
  if (model_.rules.size() >= 2) {
    std::optional<std::size_t> victim = ers_update(model_);
    if (!victim) {
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < model_.rules.size(); ++i) {
        const Rule& r = model_.rules[i];
        if (pplus_declining(r, cfg.prune_grace) && r.pplus.value < lowest &&
            !sole_class_carrier(model_.rules, i)) {
          lowest = r.pplus.value;
          victim = i;
        }
      }
    }
    if (victim) {
      const std::uint64_t id = model_.rules[*victim].id;
      archive_rule(model_, *victim);
      archived_now.push_back(id);
      emit(EventType::Prune, index, id);
    }
  } else {
    ers_update(model_);
  }

  double max_dq = g.dq_new;
  for (double d : g.dq_rules) max_dq = std::max(max_dq, d);
  if (auto rec = recall_check(model_, max_dq, archived_now)) {
    const std::uint64_t id = model_.archive[*rec].id;
    recall_rule(model_, *rec);
    emit(EventType::Recall, index, id);
  }

  std::size_t w = index_of(model_.rules, winner_id);
  if (w < model_.rules.size() && model_.rules.size() >= 2) {
    const std::size_t other = nearest_other(model_.rules, w);
    const MergeCheck mc = merge_check(model_.rules[w], model_.rules[other]);
    if (mc.merge && merge_admissible(model_.rules[w], model_.rules[other], cfg.chi2_alpha)) {
      Rule merged = merge_rules(model_.rules[w], model_.rules[other], mc.overlap);
      const std::uint64_t gone =
          merged.id == model_.rules[w].id ? model_.rules[other].id : model_.rules[w].id;
      const std::size_t keep = merged.id == model_.rules[w].id ? w : other;
      const std::size_t drop = keep == w ? other : w;
      model_.rules[keep] = std::move(merged);
      model_.rules.erase(model_.rules.begin() + static_cast<std::ptrdiff_t>(drop));
      emit(EventType::Merge, index, model_.rules[keep < drop ? keep : keep - 1].id, gone);
    }
  }

  out.events_emitted = events_.size() - events_before;
  return out;
}

}  // namespace rclass
