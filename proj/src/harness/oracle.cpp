#include "rclass/harness/oracle.hpp"

namespace rclass::harness {

std::optional<int> InteractiveOracle::label(const StreamSample& sample, const Verdict& verdict) {
  LabelQuery q;
  q.index = sample.index;
  q.features.assign(sample.x.data(), sample.x.data() + sample.x.size());
  q.output_conflict = verdict.output_conf;
  if (verdict.input_posterior.size() > 0) {
    q.input_posterior.assign(verdict.input_posterior.data(),
                             verdict.input_posterior.data() + verdict.input_posterior.size());
  }
  return hub_.ask(std::move(q), timeout_);
}

}  // namespace rclass::harness
