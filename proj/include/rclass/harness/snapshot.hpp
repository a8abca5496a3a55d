#pragma once

// Binary model snapshots: "RCLS", u32 version, u64 payload length, payload,
// u32 crc32 of the payload. All numbers little-endian, doubles bit-exact.

#include <cstdint>
#include <string>
#include <vector>

#include "rclass/types.hpp"

namespace rclass::harness {

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> snapshot_bytes(const ModelState& model);

// Throws VersionMismatch or CorruptSnapshot.
ModelState snapshot_from_bytes(const std::vector<std::uint8_t>& bytes);

void snapshot_save(const ModelState& model, const std::string& path);
ModelState snapshot_load(const std::string& path);

}  // namespace rclass::harness
