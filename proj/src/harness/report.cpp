#include "rclass/harness/report.hpp"

#include <filesystem>
#include <fstream>

#include "rclass/errors.hpp"

namespace rclass::harness {

using nlohmann::json;

json to_json(const StructuralEvent& e) {
  json j{{"type", event_name(e.type)}, {"index", e.sample_index}, {"rule", e.rule_id}};
  if (e.other_id) j["other"] = e.other_id;
  return j;
}

json to_json(const LabelQuery& q) {
  return {{"id", q.id},
          {"index", q.index},
          {"features", q.features},
          {"output_conflict", q.output_conflict},
          {"input_posterior", q.input_posterior},
          {"deadline_ms", q.deadline_ms}};
}

json to_json(const EngineStatus& s) {
  return {{"rules", s.rules},         {"samples_seen", s.samples_seen},
          {"labeled", s.labeled},     {"budget_spent", s.budget_spent},
          {"theta", s.theta},         {"reserved", s.reserved}};
}

json to_json(const RunReport& r) {
  json events = json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  json rules = json::array();
  for (const auto& [i, n] : r.rule_trace) rules.push_back({i, n});
  json weights = json::array();
  for (const auto& [i, w] : r.weight_trace) {
    json row = json::array({i});
    for (double v : w) row.push_back(v);
    weights.push_back(std::move(row));
  }
  return {{"classification_rate", r.classification_rate},
          {"runtime_seconds", r.runtime_seconds},
          {"labeled_count", r.labeled_count},
          {"oracle_invocations", r.oracle_invocations},
          {"oracle_timeouts", r.oracle_timeouts},
          {"final_rule_count", r.final_rule_count},
          {"n_train", r.n_train},
          {"n_test", r.n_test},
          {"replayed", r.replayed},
          {"prequential_accuracy", r.prequential_accuracy},
          {"confusion", r.confusion},
          {"rule_trace", std::move(rules)},
          {"feature_weight_trace", std::move(weights)},
          {"event_log", std::move(events)}};
}

json to_json(const FoldSummary& s) {
  json runs = json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"classification_rate", r.classification_rate},
                    {"labeled_count", r.labeled_count},
                    {"final_rule_count", r.final_rule_count},
                    {"runtime_seconds", r.runtime_seconds}});
  }
  return {{"folds", s.runs.size()},
          {"classification_rate", {{"mean", s.cr_mean}, {"std", s.cr_std}}},
          {"labeled_count", {{"mean", s.ns_mean}, {"std", s.ns_std}}},
          {"final_rule_count", {{"mean", s.rules_mean}, {"std", s.rules_std}}},
          {"runtime_seconds_mean", s.rt_mean},
          {"runs", std::move(runs)}};
}

EngineStatus engine_status(const ModelState& m) {
  EngineStatus s;
  s.rules = m.rules.size();
  s.samples_seen = m.n_seen;
  s.labeled = m.n_learned;
  s.budget_spent = m.selection.b;
  s.theta = m.selection.theta;
  s.reserved = m.reserved.items.size();
  return s;
}

void write_traces(const RunReport& r, const std::string& directory) {
  const std::filesystem::path dir(directory);
  std::filesystem::create_directories(dir);
  std::ofstream rules(dir / "rules_trace.csv");
  std::ofstream weights(dir / "feature_weights.csv");
  if (!rules || !weights) throw Error("cannot write traces into " + directory);
  rules << "sample_index,rule_count\n";
  for (const auto& [i, n] : r.rule_trace) rules << i << ',' << n << '\n';
  const std::size_t u = r.weight_trace.empty() ? 0 : r.weight_trace.front().second.size();
  weights << "sample_index";
  for (std::size_t j = 0; j < u; ++j) weights << ",lambda_" << j + 1;
  weights << '\n';
  weights.precision(10);
  for (const auto& [i, w] : r.weight_trace) {
    weights << i;
    for (double v : w) weights << ',' << v;
    weights << '\n';
  }
}

void HubObserver::on_step(const Classifier& model, const StreamSample& s, const Verdict&, bool) {
  hub_.publish_rule_count(s.index + 1, model.state().rules.size());
  hub_.publish_status(engine_status(model.state()));
}

void HubObserver::on_event(const StructuralEvent& e) { hub_.publish_event(e); }

void HubObserver::on_weights(std::uint64_t index, const Vector& w) {
  hub_.publish_weights(index, std::vector<double>(w.data(), w.data() + w.size()));
}

}  // namespace rclass::harness
