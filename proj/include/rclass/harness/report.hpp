#pragma once

#include <json.hpp>
#include <string>

#include "rclass/harness/hub.hpp"
#include "rclass/harness/prequential.hpp"

namespace rclass::harness {

nlohmann::json to_json(const StructuralEvent& event);
nlohmann::json to_json(const LabelQuery& query);
nlohmann::json to_json(const EngineStatus& status);

// The full report. runtime_seconds is the only wall-clock field.
nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const FoldSummary& summary);

EngineStatus engine_status(const ModelState& model);

// Mirrors a run into the hub for protocol clients.
class HubObserver final : public RunObserver {
 public:
  explicit HubObserver(LabelHub& hub) : hub_(hub) {}
  void on_step(const Classifier& model, const StreamSample& s, const Verdict&, bool) override;
  void on_event(const StructuralEvent& e) override;
  void on_weights(std::uint64_t index, const Vector& w) override;

 private:
  LabelHub& hub_;
};

// rules_trace.csv and feature_weights.csv inside `directory`.
void write_traces(const RunReport& report, const std::string& directory);

}  // namespace rclass::harness
