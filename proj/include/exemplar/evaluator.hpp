#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "exemplar/batch.hpp"
#include "exemplar/device.hpp"
#include "exemplar/eval/chunking.hpp"
#include "exemplar/eval/parallel.hpp"
#include "exemplar/eval/reference.hpp"
#include "exemplar/eval/tiled.hpp"
#include "exemplar/ground_set.hpp"

namespace exemplar {

enum class Backend { reference, parallel, tiled };

constexpr std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::reference: return "reference";
    case Backend::parallel: return "parallel";
    case Backend::tiled: return "tiled";
  }
  return "?";
}

inline std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "reference") return Backend::reference;
  if (s == "parallel") return Backend::parallel;
  if (s == "tiled") return Backend::tiled;
  return std::nullopt;
}

inline constexpr Backend kAllBackends[] = {Backend::reference, Backend::parallel, Backend::tiled};

struct Evaluator {
  Backend backend = Backend::reference;
  DeviceLimits limits{};
  std::size_t worker_count = 1;
};

/// f(S_j) for every set of the batch.
template <class T, class D>
std::vector<accum_t<T>> evaluate_batch(const Evaluator& evaluator, const GroundSet<T, D>& ground,
                                       const EvaluationBatch<T>& batch) {
  if (evaluator.worker_count == 0) fail(Errc::invalid_argument, "worker count must be positive");
  evaluator.limits.validate();
  check_same_dims(batch.d(), ground.d());
  switch (evaluator.backend) {
    case Backend::reference: return evaluate_reference(ground, batch);
    case Backend::parallel: return evaluate_parallel(ground, batch, evaluator.worker_count);
    case Backend::tiled:
      return evaluate_tiled(ground, batch, evaluator.limits, evaluator.worker_count);
  }
  fail(Errc::invalid_argument, "unknown backend");
}

/// Splits the batch into memory-budget-sized groups of consecutive sets,
/// evaluates each on its own and concatenates the results in set order.
/// Per-set results do not depend on the grouping.
template <class T, class D>
std::vector<accum_t<T>> evaluate_chunked(const Evaluator& evaluator, const GroundSet<T, D>& ground,
                                         const EvaluationBatch<T>& batch, std::uint64_t budget,
                                         ChunkPlan* plan_out = nullptr) {
  const ChunkPlan plan = plan_chunks(
      budget, estimate_set_memory(ground.n(), batch.k_max(), batch.d(), scalar_traits<T>::precision),
      batch.l());
  if (plan_out) *plan_out = plan;
  if (plan.chunk_count == 1) return evaluate_batch(evaluator, ground, batch);

  std::vector<accum_t<T>> out;
  out.reserve(batch.l());
  for (std::uint64_t first = 0; first < batch.l(); first += plan.chunk_size) {
    const std::size_t count =
        static_cast<std::size_t>(std::min<std::uint64_t>(plan.chunk_size, batch.l() - first));
    const auto part = evaluate_batch(evaluator, ground, batch.slice(first, count));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace exemplar
