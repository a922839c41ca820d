#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exemplar/evaluator.hpp"
#include "exemplar/objective.hpp"

namespace exemplar {

template <class T>
struct OptimizationResult {
  std::vector<std::size_t> exemplar_indices;  // in selection order
  std::vector<accum_t<T>> values;             // f(S_i) after step i
  std::uint64_t evaluations = 0;
};

/// Greedy maximization under |S| <= k. Each step evaluates the whole batch
/// {S u {c} : c in V \ S} at once and keeps the best candidate; ties go to
/// the lowest ground index. With `memory_budget` set, batches are chunked.
template <class T, class D>
OptimizationResult<T> greedy_maximize(const GroundSet<T, D>& ground, std::size_t k,
                                      const Evaluator& evaluator,
                                      std::optional<std::uint64_t> memory_budget = std::nullopt) {
  if (k > ground.n()) {
    fail(Errc::budget_exceeds_ground_set,
         "k = " + std::to_string(k) + " exceeds |V| = " + std::to_string(ground.n()));
  }
  const std::size_t n = ground.n();
  const std::size_t d = ground.d();
  const auto rows = ground.row_major();
  auto vector_of = [&](std::size_t i) { return std::span<const T>(rows).subspan(i * d, d); };

  OptimizationResult<T> result;
  std::vector<bool> selected(n, false);
  std::vector<T> current;  // row-major selected vectors
  for (std::size_t step = 0; step < k; ++step) {
    std::vector<std::size_t> candidates;
    candidates.reserve(n - step);
    for (std::size_t i = 0; i < n; ++i)
      if (!selected[i]) candidates.push_back(i);

    EvaluationBatch<T> batch(d);
    std::vector<T> set_rows = current;
    set_rows.resize(current.size() + d);
    for (std::size_t c : candidates) {
      const auto v = vector_of(c);
      std::copy(v.begin(), v.end(), set_rows.begin() + static_cast<std::ptrdiff_t>(current.size()));
      batch.add_set(set_rows, step + 1);
    }

    const auto values = memory_budget ? evaluate_chunked(evaluator, ground, batch, *memory_budget)
                                      : evaluate_batch(evaluator, ground, batch);
    std::size_t best = 0;
    for (std::size_t c = 1; c < values.size(); ++c)
      if (values[c] > values[best]) best = c;

    const std::size_t chosen = candidates[best];
    selected[chosen] = true;
    const auto v = vector_of(chosen);
    current.insert(current.end(), v.begin(), v.end());
    result.exemplar_indices.push_back(chosen);
    result.values.push_back(values[best]);
    result.evaluations += candidates.size();
  }
  return result;
}

template <class T>
struct BruteForceResult {
  std::vector<std::size_t> indices;
  accum_t<T> value{};
};

/// Exhaustive maximum over all subsets of size exactly k (by monotonicity
/// these dominate smaller ones). Guarded at one million subsets.
template <class T, class D>
BruteForceResult<T> brute_force_optimum(const GroundSet<T, D>& ground, std::size_t k,
                                        std::uint64_t max_subsets = 1'000'000) {
  const std::size_t n = ground.n();
  if (k > n) fail(Errc::budget_exceeds_ground_set, "k exceeds |V|");
  std::uint64_t subsets = 1;
  for (std::size_t i = 0; i < k; ++i) {
    subsets = subsets * (n - i) / (i + 1);
    if (subsets > max_subsets) {
      fail(Errc::instance_too_large, "C(" + std::to_string(n) + ", " + std::to_string(k) +
                                         ") exceeds " + std::to_string(max_subsets));
    }
  }

  BruteForceResult<T> best;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  VectorSet<T> set(k);
  bool first = true;
  while (true) {
    for (std::size_t m = 0; m < k; ++m) set[m] = ground.vector(pick[m]);
    const accum_t<T> value = exemplar_value(ground, std::span<const std::vector<T>>(set));
    if (first || value > best.value) {
      best.value = value;
      best.indices = pick;
      first = false;
    }
    // next combination in lexicographic order
    std::size_t m = k;
    while (m > 0 && pick[m - 1] == n - k + (m - 1)) --m;
    if (m == 0) break;
    ++pick[m - 1];
    for (std::size_t r = m; r < k; ++r) pick[r] = pick[r - 1] + 1;
  }
  return best;
}

/// Index of the nearest exemplar for every ground vector; ties go to the
/// lower exemplar index.
template <class T, class D>
std::vector<std::size_t> assign_clusters(const GroundSet<T, D>& ground,
                                         std::span<const std::vector<T>> exemplars) {
  if (exemplars.empty()) fail(Errc::empty_evaluation_set, "no exemplars to assign to");
  for (const auto& e : exemplars) check_same_dims(e.size(), ground.d());
  std::vector<std::size_t> labels(ground.n());
  std::vector<T> v(ground.d());
  for (std::size_t i = 0; i < ground.n(); ++i) {
    ground.copy_vector(i, v);
    std::size_t best = 0;
    compute_t<T> best_distance{};
    for (std::size_t e = 0; e < exemplars.size(); ++e) {
      const compute_t<T> dist = checked_distance<T>(ground.dissimilarity(), std::span<const T>(v),
                                                    std::span<const T>(exemplars[e]));
      if (e == 0 || dist < best_distance) {
        best = e;
        best_distance = dist;
      }
    }
    labels[i] = best;
  }
  return labels;
}

}  // namespace exemplar
