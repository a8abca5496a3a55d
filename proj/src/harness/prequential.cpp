#include "rclass/harness/prequential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "rclass/errors.hpp"

namespace rclass::harness {

double RunReport::class_recall(int o) const {
  if (o < 0 || static_cast<std::size_t>(o) >= confusion.size()) return 0.0;
  const auto& row = confusion[static_cast<std::size_t>(o)];
  const auto total = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  return total ? static_cast<double>(row[static_cast<std::size_t>(o)]) / static_cast<double>(total)
               : 0.0;
}

double RunReport::hit_rate(std::size_t from, std::size_t to) const {
  to = std::min(to, prequential_hits.size());
  if (from >= to) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = from; i < to; ++i) hits += prequential_hits[i];
  return static_cast<double>(hits) / static_cast<double>(to - from);
}

RunReport run_prequential(Classifier& model, const std::vector<StreamSample>& stream,
                          Oracle& oracle, const RunOptions& options, RunObserver* observer) {
  if (options.n_train + options.n_test > stream.size()) {
    throw Error("train/test split exceeds the stream length");
  }
  const auto start = std::chrono::steady_clock::now();
  const int C = model.state().n_classes;
  const std::size_t every = options.weight_trace_every
                                ? options.weight_trace_every
                                : static_cast<std::size_t>(model.state().config.window);

  RunReport rep;
  rep.n_train = options.n_train;
  rep.n_test = options.n_test;
  rep.prequential_hits.reserve(options.n_train);
  rep.budget_trace.reserve(options.n_train);
  rep.rule_trace.reserve(options.n_train + 1);
  rep.confusion.assign(static_cast<std::size_t>(C), std::vector<std::uint64_t>(C, 0));

  auto record_weights = [&](std::uint64_t index) {
    const Vector& w = model.state().fweights.weights;
    rep.weight_trace.emplace_back(index, std::vector<double>(w.data(), w.data() + w.size()));
    if (observer) observer->on_weights(index, w);
  };
  auto flush_events = [&](std::size_t from) {
    const auto& ev = model.events();
    for (std::size_t e = from; e < ev.size(); ++e) {
      rep.events.push_back(ev[e]);
      if (observer) observer->on_event(ev[e]);
    }
  };

  model.clear_events();
  rep.rule_trace.emplace_back(0, model.state().rules.size());
  record_weights(0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < options.n_train; ++i) {
    const StreamSample& s = stream[i];
    const std::size_t events_before = model.events().size();
    bool hit = false;
    if (!model.state().rules.empty() && s.label) hit = model.classify(s.x) == *s.label;
    rep.prequential_hits.push_back(hit ? 1 : 0);
    hits += hit ? 1 : 0;

    const Verdict verdict = model.decide(s.x);
    bool labeled = false;
    if (verdict.query) {
      if (const auto label = oracle.request(s, verdict)) {
        StreamSample lab = s;
        lab.label = *label;
        model.learn(lab);
        labeled = true;
        ++rep.labeled_count;
      } else {
        ++rep.oracle_timeouts;
      }
    }
    model.record_label_outcome(labeled);
    rep.budget_trace.push_back(model.state().selection.b);
    rep.rule_trace.emplace_back(s.index + 1, model.state().rules.size());
    if ((i + 1) % every == 0) record_weights(s.index + 1);
    flush_events(events_before);
    if (observer) observer->on_step(model, s, verdict, labeled);
  }
  if (options.replay_at_end) {
    const std::size_t events_before = model.events().size();
    rep.replayed = model.replay();
    flush_events(events_before);
    if (rep.replayed > 0) {
      const std::uint64_t end = options.n_train ? stream[options.n_train - 1].index + 1 : 0;
      rep.rule_trace.emplace_back(end, model.state().rules.size());
    }
  }
  rep.prequential_accuracy =
      options.n_train ? static_cast<double>(hits) / static_cast<double>(options.n_train) : 0.0;

  std::size_t correct = 0;
  for (std::size_t i = options.n_train; i < options.n_train + options.n_test; ++i) {
    const StreamSample& s = stream[i];
    if (!s.label) throw Error("test sample without a label");
    const int pred = model.state().rules.empty() ? 0 : model.classify(s.x);
    correct += pred == *s.label ? 1 : 0;
    ++rep.confusion[static_cast<std::size_t>(*s.label)][static_cast<std::size_t>(pred)];
  }
  rep.classification_rate =
      options.n_test ? static_cast<double>(correct) / static_cast<double>(options.n_test) : 0.0;
  rep.final_rule_count = model.state().rules.size();
  rep.oracle_invocations = oracle.invocations();
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

RunReport run_dataset(const Dataset& data, const HyperParams& config, Oracle& oracle,
                      const RunOptions& options, RunObserver* observer) {
  std::vector<StreamSample> stream = data.samples;
  MinMaxScaler::fit(stream, options.n_train).apply_all(stream);
  Classifier model(config, data.n_classes, data.n_features());
  return run_prequential(model, stream, oracle, options, observer);
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace

FoldSummary run_folds(const Dataset& data, const HyperParams& config, const RunOptions& options,
                      int folds, std::uint64_t seed) {
  FoldSummary sum;
  std::mt19937_64 rng(seed);
  std::vector<double> cr, ns, fr, rt;
  for (int k = 0; k < folds; ++k) {
    Dataset shuffled = data;
    std::shuffle(shuffled.samples.begin(), shuffled.samples.end(), rng);
    for (std::size_t i = 0; i < shuffled.samples.size(); ++i) shuffled.samples[i].index = i;
    FileOracle oracle;
    sum.runs.push_back(run_dataset(shuffled, config, oracle, options));
    const RunReport& r = sum.runs.back();
    cr.push_back(r.classification_rate);
    ns.push_back(static_cast<double>(r.labeled_count));
    fr.push_back(static_cast<double>(r.final_rule_count));
    rt.push_back(r.runtime_seconds);
  }
  std::tie(sum.cr_mean, sum.cr_std) = mean_std(cr);
  std::tie(sum.ns_mean, sum.ns_std) = mean_std(ns);
  std::tie(sum.rules_mean, sum.rules_std) = mean_std(fr);
  sum.rt_mean = mean_std(rt).first;
  return sum;
}

}  // namespace rclass::harness
