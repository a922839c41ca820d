#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "exemplar/device.hpp"
#include "exemplar/error.hpp"
#include "exemplar/precision.hpp"

namespace exemplar {

/// Bytes needed per evaluation set: its packed slice (k_max * d values),
/// its work-matrix row (n values) and 16 bytes of metadata (cardinality and
/// result slot). The ground set is not included; it is resident already.
constexpr std::uint64_t estimate_set_memory(std::uint64_t n, std::uint64_t k_max, std::uint64_t d,
                                            Precision precision) {
  return (k_max * d + n) * bytes_per_value(precision) + 16;
}

struct ChunkPlan {
  std::uint64_t chunk_size = 0;
  std::uint64_t chunk_count = 0;
  std::uint64_t per_set_bytes = 0;
  std::uint64_t free_bytes = 0;
};

/// chunk_size = min(floor(free / per_set), l), chunk_count = ceil(l / chunk_size).
inline ChunkPlan plan_chunks(std::uint64_t free_bytes, std::uint64_t per_set_bytes, std::uint64_t l) {
  if (per_set_bytes == 0 || l == 0) {
    fail(Errc::invalid_argument, "chunk planning needs per-set memory and l >= 1");
  }
  const std::uint64_t fit = free_bytes / per_set_bytes;
  if (fit == 0) {
    fail(Errc::out_of_memory,
         "a single evaluation set needs " + std::to_string(per_set_bytes) + " bytes but only " +
             std::to_string(free_bytes) +
             " are free; use a lower precision or a larger memory budget");
  }
  ChunkPlan plan;
  plan.chunk_size = std::min(fit, l);
  plan.chunk_count = (l + plan.chunk_size - 1) / plan.chunk_size;
  plan.per_set_bytes = per_set_bytes;
  plan.free_bytes = free_bytes;
  return plan;
}

}  // namespace exemplar
