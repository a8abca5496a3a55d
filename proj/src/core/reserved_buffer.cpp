#include "rclass/reserved_buffer.hpp"

#include <utility>

namespace rclass {

void reserve(ReservedBuffer& buffer, const StreamSample& sample, std::uint64_t stored_at) {
  while (buffer.items.size() >= buffer.capacity && !buffer.items.empty()) {
    buffer.items.pop_front();
    ++buffer.evicted;
  }
  buffer.items.push_back({sample, ReserveReason::NoGrowNoAdapt, stored_at});
}

ReservedSample take_oldest(ReservedBuffer& buffer) {
  ReservedSample front = std::move(buffer.items.front());
  buffer.items.pop_front();
  return front;
}

}  // namespace rclass
