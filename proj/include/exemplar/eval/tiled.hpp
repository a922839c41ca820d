#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "exemplar/batch.hpp"
#include "exemplar/detail/parallel.hpp"
#include "exemplar/device.hpp"
#include "exemplar/ground_set.hpp"
#include "exemplar/work_matrix.hpp"

namespace exemplar {

/// Optional instrumentation of a tiled kernel launch.
struct TiledTrace {
  explicit TiledTrace(std::size_t n) : column_loads(std::make_unique<std::atomic<std::uint32_t>[]>(n)), columns(n) {}

  std::unique_ptr<std::atomic<std::uint32_t>[]> column_loads;  // staging loads per ground vector
  std::size_t columns;
  std::atomic<std::uint64_t> blocks{0};
  std::atomic<std::uint64_t> max_staged_bytes{0};

  std::uint32_t loads(std::size_t i) const { return column_loads[i].load(); }
};

namespace detail {

/// Lanes (threads along y) processed together by the host. Chosen so that
/// the partial-sum scratch of one lane tile stays in L1.
inline constexpr std::size_t kLaneTile = 512;

template <class T, class D>
struct BlockRunner {
  const GroundSet<T, D>& ground;
  const PackedBatch<T>& packed;
  const KernelConfig& config;
  WorkMatrix<T>& w;
  TiledTrace* trace;

  std::vector<T> staging;                // shared-memory emulation, b_x vectors
  std::vector<compute_t<T>> partials;    // kPartialSums x kLaneTile
  std::vector<compute_t<T>> nearest;     // kLaneTile
  std::vector<T> member;                 // gather buffer for non-separable dissimilarities

  BlockRunner(const GroundSet<T, D>& g, const PackedBatch<T>& p, const KernelConfig& c,
              WorkMatrix<T>& work, TiledTrace* t)
      : ground(g), packed(p), config(c), w(work), trace(t),
        staging(c.block.x * g.d()), partials(kPartialSums * kLaneTile), nearest(kLaneTile),
        member(g.d()) {}

  void run(std::size_t block_x, std::size_t block_y) {
    const std::size_t n = ground.n();
    const std::size_t d = ground.d();
    const std::size_t l = packed.l();
    const std::size_t col0 = block_x * config.block.x;
    const std::size_t row0 = block_y * config.block.y;
    const std::size_t cols = std::min(config.block.x, n - col0);
    const std::size_t rows = std::min(config.block.y, l - row0);

    // Lane t_y = 0 of each column loads its ground vector; the rest of the
    // block waits at the barrier, which here is simply program order.
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t k = 0; k < d; ++k) staging[c * d + k] = ground.at(col0 + c, k);
      if (trace) trace->column_loads[col0 + c].fetch_add(1, std::memory_order_relaxed);
    }
    if (trace) {
      trace->blocks.fetch_add(1, std::memory_order_relaxed);
      const std::uint64_t bytes = cols * d * sizeof(T);
      std::uint64_t seen = trace->max_staged_bytes.load();
      while (bytes > seen && !trace->max_staged_bytes.compare_exchange_weak(seen, bytes)) {
      }
    }

    for (std::size_t c = 0; c < cols; ++c) {
      const std::span<const T> v(staging.data() + c * d, d);
      const std::size_t i = col0 + c;
      const compute_t<T> aux = scalar_traits<T>::load(ground.aux_distances()[i]);
      for (std::size_t t0 = 0; t0 < rows; t0 += kLaneTile) {
        const std::size_t lanes = std::min(kLaneTile, rows - t0);
        const std::size_t first_set = row0 + t0;
        compute_lane_tile(v, first_set, lanes);
        for (std::size_t t = 0; t < lanes; ++t) {
          w.at(first_set + t, i) =
              scalar_traits<T>::store(normalized_loss<T>(std::min(nearest[t], aux), n));
        }
      }
    }
  }

  // nearest[t] = min over members e < |S_j| of d(v, S_j[e]), j = first_set + t.
  void compute_lane_tile(std::span<const T> v, std::size_t first_set, std::size_t lanes) {
    using R = scalar_traits<T>;
    const std::size_t d = ground.d();
    const std::size_t l = packed.l();
    const std::size_t k_max = packed.k_max();
    const auto cards = packed.cardinalities();
    const T* values = packed.values().data();

    std::size_t tile_k_max = 0;
    for (std::size_t t = 0; t < lanes; ++t) tile_k_max = std::max(tile_k_max, cards[first_set + t]);
    std::fill_n(nearest.begin(), lanes, R::max_finite());

    for (std::size_t e = 0; e < tile_k_max; ++e) {
      if constexpr (SeparableDissimilarity<D, T>) {
        compute_t<T>* acc = partials.data();
        std::fill(partials.begin(), partials.end(), compute_t<T>{});
        for (std::size_t k = 0; k < d; ++k) {
          compute_t<T>* lane_acc = acc + (k % kPartialSums) * kLaneTile;
          const T* slot = values + k * (k_max * l) + e * l + first_set;
          const compute_t<T> vk = R::load(v[k]);
          for (std::size_t t = 0; t < lanes; ++t) {
            lane_acc[t] = R::round(lane_acc[t] + D::template term<T>(vk, R::load(slot[t])));
          }
        }
        for (std::size_t t = 0; t < lanes; ++t) {
          // Masked lanes (blank slots) are computed but never take effect.
          if (e >= cards[first_set + t]) continue;
          const compute_t<T> dist = combine_partials<T>(acc + t, kLaneTile);
          if (std::isnan(dist)) fail(Errc::invalid_data, std::string(D::name) + " returned NaN");
          nearest[t] = std::min(nearest[t], dist);
        }
      } else {
        for (std::size_t t = 0; t < lanes; ++t) {
          if (e >= cards[first_set + t]) continue;
          for (std::size_t k = 0; k < d; ++k) {
            member[k] = values[k * (k_max * l) + e * l + first_set + t];
          }
          nearest[t] = std::min(
              nearest[t],
              checked_distance<T>(ground.dissimilarity(), v, std::span<const T>(member)));
        }
      }
    }
  }
};

}  // namespace detail

/// Executes the work-matrix kernel block by block. Each block stages its
/// b_x ground vectors once, then computes every covered cell
/// W[j][i] = |V|^-1 min(min_{e < |S_j|} d(v_i, S_j[e]), d(v_i, e0)).
/// Blocks are distributed over `workers` host threads.
template <class T, class D>
WorkMatrix<T> run_tiled_kernel(const GroundSet<T, D>& ground, const PackedBatch<T>& packed,
                               const KernelConfig& config, std::size_t workers = 1,
                               TiledTrace* trace = nullptr) {
  check_same_dims(packed.d(), ground.d());
  if (config.block.x * config.grid.x < ground.n() || config.block.y * config.grid.y < packed.l()) {
    fail(Errc::invalid_argument, "kernel configuration does not cover the work matrix");
  }
  if (trace && trace->columns != ground.n()) {
    fail(Errc::invalid_argument, "trace sized for a different ground set");
  }
  WorkMatrix<T> w(packed.l(), ground.n());
  const std::size_t block_count = config.grid.x * config.grid.y;
  detail::parallel_for(workers, block_count, [&](std::size_t, std::size_t begin, std::size_t end) {
    detail::BlockRunner<T, D> runner(ground, packed, config, w, trace);
    for (std::size_t b = begin; b < end; ++b) runner.run(b % config.grid.x, b / config.grid.x);
  });
  return w;
}

/// Tiled backend on an already packed batch: kernel, then W * 1, then
/// f(S_j) = L({e0}) - row_j.
template <class T, class D>
std::vector<accum_t<T>> evaluate_packed(const GroundSet<T, D>& ground, const PackedBatch<T>& packed,
                                        const DeviceLimits& limits, std::size_t workers = 1,
                                        TiledTrace* trace = nullptr) {
  const KernelConfig config =
      compute_kernel_config(ground.n(), packed.l(), ground.vector_bytes(), limits);
  const WorkMatrix<T> w = run_tiled_kernel(ground, packed, config, workers, trace);
  std::vector<accum_t<T>> out = reduce_rows(w, workers);
  for (auto& value : out) value = ground.aux_loss() - value;
  return out;
}

template <class T, class D>
std::vector<accum_t<T>> evaluate_tiled(const GroundSet<T, D>& ground,
                                       const EvaluationBatch<T>& batch, const DeviceLimits& limits,
                                       std::size_t workers = 1, TiledTrace* trace = nullptr) {
  check_same_dims(batch.d(), ground.d());
  return evaluate_packed(ground, pack_batch(batch), limits, workers, trace);
}

}  // namespace exemplar
