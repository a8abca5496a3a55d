#include "rclass/harness/hub.hpp"

#include <json.hpp>

#include "rclass/harness/report.hpp"

namespace rclass::harness {

using nlohmann::json;

LabelHub::LabelHub(int n_classes, std::size_t message_capacity)
    : n_classes_(n_classes), capacity_(message_capacity) {}

std::optional<int> LabelHub::ask(LabelQuery query, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (closed_) return std::nullopt;
  query.id = next_query_id_++;
  query.deadline_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          (std::chrono::system_clock::now() + timeout).time_since_epoch())
                          .count();
  pending_ = query;
  answer_.reset();
  push_message(json{{"type", "query"}, {"data", to_json(query)}}.dump());
  cv_answer_.wait_for(lock, timeout, [&] { return answer_.has_value() || closed_; });
  pending_.reset();
  std::optional<int> out = answer_;
  answer_.reset();
  return out;
}

void LabelHub::publish_status(const EngineStatus& status) {
  std::lock_guard lock(mu_);
  status_ = status;
  push_message(json{{"type", "state"}, {"data", to_json(status)}}.dump());
}

void LabelHub::publish_rule_count(std::uint64_t index, std::size_t count) {
  std::lock_guard lock(mu_);
  rule_trace_.emplace_back(index, count);
}

void LabelHub::publish_weights(std::uint64_t index, const std::vector<double>& weights) {
  std::lock_guard lock(mu_);
  weight_trace_.emplace_back(index, weights);
}

void LabelHub::publish_event(const StructuralEvent& event) {
  std::lock_guard lock(mu_);
  events_.push_back(event);
  push_message(json{{"type", "event"}, {"data", to_json(event)}}.dump());
}

std::optional<LabelQuery> LabelHub::pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

SubmitResult LabelHub::submit(std::uint64_t id, int label) {
  std::lock_guard lock(mu_);
  if (!pending_ || pending_->id != id || answer_) return SubmitResult::Stale;
  if (label < 0 || label >= n_classes_) return SubmitResult::BadClass;
  answer_ = label;
  cv_answer_.notify_all();
  return SubmitResult::Accepted;
}

EngineStatus LabelHub::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

std::vector<std::pair<std::uint64_t, std::size_t>> LabelHub::rule_trace() const {
  std::lock_guard lock(mu_);
  return rule_trace_;
}

std::vector<std::pair<std::uint64_t, std::vector<double>>> LabelHub::weight_trace() const {
  std::lock_guard lock(mu_);
  return weight_trace_;
}

std::vector<StructuralEvent> LabelHub::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::uint64_t LabelHub::messages_after(std::uint64_t after, std::vector<std::string>& out,
                                       std::chrono::milliseconds wait) {
  std::unique_lock lock(mu_);
  cv_messages_.wait_for(lock, wait, [&] { return seq_ > after || closed_; });
  std::uint64_t last = after;
  for (const auto& [seq, msg] : messages_) {
    if (seq > after) {
      out.push_back(msg);
      last = seq;
    }
  }
  return last;
}

void LabelHub::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_answer_.notify_all();
  cv_messages_.notify_all();
}

bool LabelHub::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

void LabelHub::push_message(std::string msg) {
  messages_.emplace_back(++seq_, std::move(msg));
  while (messages_.size() > capacity_) messages_.pop_front();
  cv_messages_.notify_all();
}

}  // namespace rclass::harness
