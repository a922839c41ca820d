#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "exemplar/ground_set.hpp"

namespace exemplar {

template <class T>
using VectorSet = std::vector<std::vector<T>>;

namespace detail {

template <class T, class D>
compute_t<T> nearest_distance(const GroundSet<T, D>& ground, std::span<const T> v,
                              std::span<const std::vector<T>> set) {
  compute_t<T> best = scalar_traits<T>::max_finite();
  for (const auto& s : set) {
    check_same_dims(s.size(), ground.d());
    best = std::min(best, checked_distance<T>(ground.dissimilarity(), v, std::span<const T>(s)));
  }
  return best;
}

}  // namespace detail

/// k-medoids loss L(S) = sum_i |V|^-1 min_{s in S} d(v_i, s), summed over
/// ascending i. Summing per-point shares (rather than dividing once) keeps
/// it identical to the row sum of a work matrix.
template <class T, class D>
accum_t<T> kmedoids_loss(const GroundSet<T, D>& ground, std::span<const std::vector<T>> set) {
  if (set.empty()) fail(Errc::empty_evaluation_set, "k-medoids loss of the empty set");
  std::vector<T> v(ground.d());
  accum_t<T> loss{};
  for (std::size_t i = 0; i < ground.n(); ++i) {
    ground.copy_vector(i, v);
    loss += normalized_loss<T>(detail::nearest_distance(ground, std::span<const T>(v), set),
                               ground.n());
  }
  return loss;
}

/// L_{v_i}(S u {e0}), one cell of the work matrix.
template <class T, class D>
compute_t<T> point_loss(const GroundSet<T, D>& ground, std::size_t i,
                        std::span<const std::vector<T>> set) {
  if (i >= ground.n()) fail(Errc::index_out_of_range, "point index " + std::to_string(i));
  const auto v = ground.vector(i);
  const compute_t<T> nearest = detail::nearest_distance(ground, std::span<const T>(v), set);
  const compute_t<T> aux = scalar_traits<T>::load(ground.aux_distances()[i]);
  return normalized_loss<T>(std::min(nearest, aux), ground.n());
}

/// f(S) = L({e0}) - L(S u {e0}). f(empty) is exactly zero.
template <class T, class D>
accum_t<T> exemplar_value(const GroundSet<T, D>& ground, std::span<const std::vector<T>> set) {
  accum_t<T> loss{};
  for (std::size_t i = 0; i < ground.n(); ++i) loss += point_loss(ground, i, set);
  return ground.aux_loss() - loss;
}

/// Discrete derivative f(S u {e}) - f(S).
template <class T, class D>
accum_t<T> marginal_gain(const GroundSet<T, D>& ground, std::span<const std::vector<T>> set,
                         const std::vector<T>& e) {
  check_same_dims(e.size(), ground.d());
  VectorSet<T> extended(set.begin(), set.end());
  extended.push_back(e);
  return exemplar_value(ground, std::span<const std::vector<T>>(extended)) -
         exemplar_value(ground, set);
}

}  // namespace exemplar
