#pragma once

// Deferred samples: labeled, accepted by selection, but neither grown nor
// adapted on. Replayed once by the learner (see Classifier::replay).

#include "rclass/types.hpp"

namespace rclass {

// Appends; the oldest entry is evicted once capacity is reached.
void reserve(ReservedBuffer& buffer, const StreamSample& sample, std::uint64_t stored_at);

// Removes and returns the oldest entry. Precondition: non-empty.
ReservedSample take_oldest(ReservedBuffer& buffer);

}  // namespace rclass
