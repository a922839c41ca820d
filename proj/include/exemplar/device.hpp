#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exemplar/error.hpp"

namespace exemplar {

/// Constants of the modelled device. Defaults are the usual CUDA values.
struct DeviceLimits {
  std::size_t max_threads_per_block = 1024;
  std::size_t shared_memory_bytes = 49152;  // beta
  std::size_t segment_bytes = 32;
  std::size_t warp_size = 32;
  std::uint64_t global_memory_bytes = 16ull << 30;  // phi

  void validate() const {
    if (max_threads_per_block == 0 || shared_memory_bytes == 0 || segment_bytes == 0 ||
        warp_size == 0 || global_memory_bytes == 0) {
      fail(Errc::invalid_argument, "device limits must be strictly positive");
    }
    if (max_threads_per_block % warp_size != 0) {
      fail(Errc::invalid_argument, "warp size must divide max threads per block");
    }
  }
};

struct Dim3 {
  std::size_t x = 1;
  std::size_t y = 1;
  std::size_t z = 1;

  friend constexpr bool operator==(const Dim3&, const Dim3&) = default;
};

/// Block and grid dimensioning for an l x n work matrix. Threads along y
/// cover evaluation sets, threads along x cover ground vectors.
struct KernelConfig {
  Dim3 block;
  Dim3 grid;
  std::size_t shared_bytes_per_block = 0;

  std::size_t block_count() const { return grid.x * grid.y * grid.z; }
  std::size_t threads_per_block() const { return block.x * block.y * block.z; }
};

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

/// b_y = min(T, l), b_x = min(floor(T / b_y), floor(beta / gamma)),
/// g_x = ceil(n / b_x), g_y = ceil(l / b_y), with T the per-block thread cap.
inline KernelConfig compute_kernel_config(std::size_t n, std::size_t l, std::size_t gamma,
                                          const DeviceLimits& limits = {}) {
  limits.validate();
  if (n == 0 || l == 0 || gamma == 0) {
    fail(Errc::invalid_argument, "kernel configuration needs n, l, gamma >= 1");
  }
  KernelConfig config;
  config.block.y = std::min(limits.max_threads_per_block, l);
  config.block.x =
      std::min(limits.max_threads_per_block / config.block.y, limits.shared_memory_bytes / gamma);
  if (config.block.x == 0) {
    fail(Errc::shared_memory_overflow,
         "a single ground vector needs " + std::to_string(gamma) + " bytes but only " +
             std::to_string(limits.shared_memory_bytes) + " bytes of shared memory are available");
  }
  config.grid.x = ceil_div(n, config.block.x);
  config.grid.y = ceil_div(l, config.block.y);
  config.shared_bytes_per_block = config.block.x * gamma;
  return config;
}

/// One lane's load: byte offset and width.
struct LaneAccess {
  std::uint64_t offset = 0;
  std::uint64_t width = 0;
};

/// Number of distinct aligned segments touched by one warp-wide load.
inline std::size_t count_transactions(std::span<const LaneAccess> lanes,
                                      const DeviceLimits& limits = {}) {
  if (lanes.size() > limits.warp_size) {
    fail(Errc::invalid_argument, std::to_string(lanes.size()) + " lanes exceed warp size " +
                                     std::to_string(limits.warp_size));
  }
  std::vector<std::uint64_t> segments;
  for (const auto& lane : lanes) {
    if (lane.width == 0) fail(Errc::invalid_argument, "lane access width must be positive");
    const std::uint64_t first = lane.offset / limits.segment_bytes;
    const std::uint64_t last = (lane.offset + lane.width - 1) / limits.segment_bytes;
    for (std::uint64_t s = first; s <= last; ++s) segments.push_back(s);
  }
  std::sort(segments.begin(), segments.end());
  return static_cast<std::size_t>(std::unique(segments.begin(), segments.end()) - segments.begin());
}

}  // namespace exemplar
