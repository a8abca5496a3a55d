#pragma once

// Rendezvous between the learning loop and protocol clients: at most one
// pending label query, the latest engine status, traces, structural events
// and a sequenced message log for event-stream subscribers.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rclass/learner.hpp"

namespace rclass::harness {

struct LabelQuery {
  std::uint64_t id = 0;
  std::uint64_t index = 0;
  std::vector<double> features;
  double output_conflict = 0.0;
  std::vector<double> input_posterior;
  std::int64_t deadline_ms = 0;  // wall clock, milliseconds since the epoch
};

struct EngineStatus {
  std::size_t rules = 0;
  std::uint64_t samples_seen = 0;
  std::uint64_t labeled = 0;
  double budget_spent = 0.0;
  double theta = 0.0;
  std::size_t reserved = 0;
};

enum class SubmitResult { Accepted, Stale, BadClass };

class LabelHub {
 public:
  explicit LabelHub(int n_classes, std::size_t message_capacity = 10000);

  // Engine side. Publishes the query and blocks until a label arrives or the
  // timeout passes (nullopt). The query is withdrawn either way.
  std::optional<int> ask(LabelQuery query, std::chrono::milliseconds timeout);

  void publish_status(const EngineStatus& status);
  void publish_rule_count(std::uint64_t index, std::size_t count);
  void publish_weights(std::uint64_t index, const std::vector<double>& weights);
  void publish_event(const StructuralEvent& event);

  // Client side.
  std::optional<LabelQuery> pending() const;
  SubmitResult submit(std::uint64_t id, int label);
  EngineStatus status() const;
  std::vector<std::pair<std::uint64_t, std::size_t>> rule_trace() const;
  std::vector<std::pair<std::uint64_t, std::vector<double>>> weight_trace() const;
  std::vector<StructuralEvent> events() const;

  // Messages with sequence number > after, waiting up to `wait` for at least
  // one. Returns the last sequence number handed out.
  std::uint64_t messages_after(std::uint64_t after, std::vector<std::string>& out,
                               std::chrono::milliseconds wait);

  // Wakes every waiter; further asks time out immediately.
  void close();
  bool closed() const;
  int n_classes() const { return n_classes_; }

 private:
  void push_message(std::string json);

  const int n_classes_;
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_answer_;
  std::condition_variable cv_messages_;
  std::optional<LabelQuery> pending_;
  std::optional<int> answer_;
  std::uint64_t next_query_id_ = 1;
  EngineStatus status_;
  std::vector<std::pair<std::uint64_t, std::size_t>> rule_trace_;
  std::vector<std::pair<std::uint64_t, std::vector<double>>> weight_trace_;
  std::vector<StructuralEvent> events_;
  std::deque<std::pair<std::uint64_t, std::string>> messages_;
  std::uint64_t seq_ = 0;
  bool closed_ = false;
};

}  // namespace rclass::harness
