#pragma once

// Prequential (test-then-train) evaluation over a labeled stream: a training
// prefix where each sample is first predicted, then offered to the selection
// stage, followed by a test suffix that only classifies.

#include <cstdint>
#include <utility>
#include <vector>

#include "rclass/harness/dataset.hpp"
#include "rclass/harness/oracle.hpp"
#include "rclass/learner.hpp"

namespace rclass::harness {

struct RunOptions {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool replay_at_end = true;
  std::size_t weight_trace_every = 0;  // 0: the selection window
};

struct RunReport {
  double classification_rate = 0.0;  // test phase; 0 when there is no test phase
  double runtime_seconds = 0.0;
  std::uint64_t labeled_count = 0;
  std::uint64_t oracle_invocations = 0;
  std::uint64_t oracle_timeouts = 0;
  std::size_t final_rule_count = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t replayed = 0;
  double prequential_accuracy = 0.0;     // training phase, predict-before-learn
  std::vector<std::uint8_t> prequential_hits;
  std::vector<double> budget_trace;      // b after every training sample
  std::vector<std::pair<std::uint64_t, std::size_t>> rule_trace;
  std::vector<std::pair<std::uint64_t, std::vector<double>>> weight_trace;
  std::vector<StructuralEvent> events;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted], test phase

  // Recall of class o over the test phase; 0 when the class is absent.
  double class_recall(int o) const;
  // Mean of prequential_hits over [from, to).
  double hit_rate(std::size_t from, std::size_t to) const;
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_step(const Classifier&, const StreamSample&, const Verdict&, bool /*labeled*/) {}
  virtual void on_event(const StructuralEvent&) {}
  virtual void on_weights(std::uint64_t /*index*/, const Vector& /*weights*/) {}
};

// Runs the stream in order. Samples in [0, n_train) train, the next n_test
// are tested. Samples must be labeled in the test phase.
RunReport run_prequential(Classifier& model, const std::vector<StreamSample>& stream,
                          Oracle& oracle, const RunOptions& options,
                          RunObserver* observer = nullptr);

// Fits min-max scaling on the training prefix, builds a fresh classifier and
// runs it.
RunReport run_dataset(const Dataset& data, const HyperParams& config, Oracle& oracle,
                      const RunOptions& options, RunObserver* observer = nullptr);

struct FoldSummary {
  std::vector<RunReport> runs;
  double cr_mean = 0.0, cr_std = 0.0;
  double ns_mean = 0.0, ns_std = 0.0;
  double rules_mean = 0.0, rules_std = 0.0;
  double rt_mean = 0.0;
};

// K runs over seeded random permutations of the dataset with the file oracle.
FoldSummary run_folds(const Dataset& data, const HyperParams& config, const RunOptions& options,
                      int folds, std::uint64_t seed);

}  // namespace rclass::harness
