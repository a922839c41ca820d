#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "exemplar/batch.hpp"
#include "exemplar/ground_set.hpp"

namespace exemplar {

namespace detail {

/// L(V, S) computed the straightforward way: per ground vector, a running
/// minimum seeded with the largest finite value, then one ascending sum and
/// a single division by |V|. `extra` (if non-empty) is an additional member
/// of S, used to fold in e0.
template <class T, class D>
accum_t<T> direct_loss(const D& dis, std::span<const T> ground_rows, std::size_t n, std::size_t d,
                       std::span<const T> set_rows, std::span<const T> extra) {
  const std::size_t members = set_rows.size() / d;
  accum_t<T> sigma{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = ground_rows.subspan(i * d, d);
    compute_t<T> t = scalar_traits<T>::max_finite();
    for (std::size_t e = 0; e < members; ++e) {
      t = std::min(t, checked_distance<T>(dis, v, set_rows.subspan(e * d, d)));
    }
    if (!extra.empty()) t = std::min(t, checked_distance<T>(dis, v, extra));
    sigma += t;
  }
  return sigma / static_cast<accum_t<T>>(n);
}

}  // namespace detail

/// f(S) for one set given as `count` row-major vectors, computed as
/// L(V, {e0}) - L(V, S u {e0}). The empty set yields exactly zero.
template <class T, class D>
accum_t<T> evaluate_single(const GroundSet<T, D>& ground, std::span<const T> set_rows) {
  if (set_rows.size() % ground.d() != 0) {
    fail(Errc::dimension_mismatch, "set buffer is not a multiple of the ground dimensionality");
  }
  const auto rows = ground.row_major();
  const auto& dis = ground.dissimilarity();
  const accum_t<T> aux_loss = detail::direct_loss<T>(dis, std::span<const T>(rows), ground.n(),
                                                     ground.d(), {}, ground.aux());
  return aux_loss - detail::direct_loss<T>(dis, std::span<const T>(rows), ground.n(), ground.d(),
                                           set_rows, ground.aux());
}

template <class T, class D>
accum_t<T> evaluate_single(const GroundSet<T, D>& ground, std::span<const std::vector<T>> set) {
  std::vector<T> flat;
  for (const auto& v : set) {
    check_same_dims(v.size(), ground.d());
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return evaluate_single(ground, std::span<const T>(flat));
}

/// Reference backend: one set after another, single-threaded.
template <class T, class D>
std::vector<accum_t<T>> evaluate_reference(const GroundSet<T, D>& ground,
                                           const EvaluationBatch<T>& batch) {
  check_same_dims(batch.d(), ground.d());
  const auto rows = ground.row_major();
  const auto& dis = ground.dissimilarity();
  const std::span<const T> ground_rows(rows);
  const accum_t<T> aux_loss =
      detail::direct_loss<T>(dis, ground_rows, ground.n(), ground.d(), {}, ground.aux());
  std::vector<accum_t<T>> out(batch.l());
  for (std::size_t j = 0; j < batch.l(); ++j) {
    out[j] = aux_loss - detail::direct_loss<T>(dis, ground_rows, ground.n(), ground.d(),
                                               batch.set(j), ground.aux());
  }
  return out;
}

}  // namespace exemplar
