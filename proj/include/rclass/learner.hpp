#pragma once

// The sequential learning loop: selection bookkeeping, admission of labeled
// samples, the structural/parametric pipeline and deferred replay.

#include <vector>

#include "rclass/selection.hpp"
#include "rclass/structure.hpp"
#include "rclass/types.hpp"

namespace rclass {

enum class EventType { Grow, Prune, Merge, Split, Recall };

const char* event_name(EventType t);

struct StructuralEvent {
  EventType type = EventType::Grow;
  std::uint64_t sample_index = 0;
  std::uint64_t rule_id = 0;
  std::uint64_t other_id = 0;  // merge partner or second split child; 0 otherwise
};

struct LearnOutcome {
  GrowDecision decision = GrowDecision::Reserve;
  bool reserved = false;  // pushed to the buffer (never set during replay)
  std::size_t events_emitted = 0;
};

class Classifier {
 public:
  Classifier(const HyperParams& config, int n_classes, int n_features);
  explicit Classifier(ModelState state);

  // Per-class outputs; throws EmptyModel.
  Vector predict(const Vector& x) const;
  int classify(const Vector& x) const;

  // Runs the selection stage and applies the threshold transition.
  Verdict decide(const Vector& x);

  // Budget bookkeeping, once per stream sample after the label outcome is
  // known.
  void record_label_outcome(bool labeled);

  // Admits a labeled sample and runs the learning pipeline. Samples that
  // neither grow nor adapt go to the reserved buffer.
  LearnOutcome learn(const StreamSample& sample);

  // Feeds every reserved sample through the pipeline once; returns how many
  // were consumed. Never enqueues.
  std::size_t replay();

  const ModelState& state() const { return model_; }
  ModelState& mutable_state() { return model_; }
  const std::vector<StructuralEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }

 private:
  LearnOutcome pipeline(const Vector& x, int label, std::uint64_t index);
  void emit(EventType t, std::uint64_t index, std::uint64_t id, std::uint64_t other = 0);

  ModelState model_;
  std::vector<StructuralEvent> events_;
};

}  // namespace rclass
