#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include "rclass/harness/hub.hpp"
#include "rclass/selection.hpp"
#include "rclass/types.hpp"

namespace rclass::harness {

class Oracle {
 public:
  virtual ~Oracle() = default;

  // nullopt means no label was obtained and the sample is skipped.
  std::optional<int> request(const StreamSample& sample, const Verdict& verdict) {
    ++invocations_;
    return label(sample, verdict);
  }
  std::uint64_t invocations() const { return invocations_; }

 protected:
  virtual std::optional<int> label(const StreamSample& sample, const Verdict& verdict) = 0;

 private:
  std::uint64_t invocations_ = 0;
};

// Labels straight from the dataset.
class FileOracle final : public Oracle {
 protected:
  std::optional<int> label(const StreamSample& sample, const Verdict&) override {
    return sample.label;
  }
};

// Publishes a query on the hub and waits for a client to answer.
class InteractiveOracle final : public Oracle {
 public:
  InteractiveOracle(LabelHub& hub, std::chrono::milliseconds timeout)
      : hub_(hub), timeout_(timeout) {}

 protected:
  std::optional<int> label(const StreamSample& sample, const Verdict& verdict) override;

 private:
  LabelHub& hub_;
  std::chrono::milliseconds timeout_;
};

}  // namespace rclass::harness
