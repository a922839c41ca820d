#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "exemplar/error.hpp"
#include "exemplar/precision.hpp"

namespace exemplar {

/// A dissimilarity maps (ground vector, set member) to a non-negative value
/// at the compute width of T. Symmetry and the triangle inequality are not
/// required. All evaluation paths call it as d(v, s) with the ground vector
/// first.
template <class D, class T>
concept Dissimilarity = requires(const D& dis, std::span<const T> x, std::span<const T> y) {
  { D::name } -> std::convertible_to<std::string_view>;
  { dis(x, y) } -> std::same_as<compute_t<T>>;
};

/// Dissimilarities of the form sum_k term(x_k, y_k). The tiled backend
/// evaluates these lane-parallel across evaluation sets.
template <class D, class T>
concept SeparableDissimilarity =
    Dissimilarity<D, T> && requires(compute_t<T> a, compute_t<T> b) {
      { D::template term<T>(a, b) } -> std::same_as<compute_t<T>>;
    };

/// Number of interleaved partial sums used by every separable reduction.
/// Dimension k lands in partial k % kPartialSums; partials are then combined
/// as a balanced tree. All backends share this order, so a separable
/// distance is bit-identical no matter which backend computes it.
inline constexpr std::size_t kPartialSums = 8;

template <class T>
compute_t<T> combine_partials(const compute_t<T>* p, std::size_t stride = 1) {
  using R = scalar_traits<T>;
  const auto a = R::round(p[0 * stride] + p[1 * stride]);
  const auto b = R::round(p[2 * stride] + p[3 * stride]);
  const auto c = R::round(p[4 * stride] + p[5 * stride]);
  const auto e = R::round(p[6 * stride] + p[7 * stride]);
  return R::round(R::round(a + b) + R::round(c + e));
}

template <class D, class T>
compute_t<T> separable_distance(std::span<const T> x, std::span<const T> y) {
  using R = scalar_traits<T>;
  using C = compute_t<T>;
  const std::size_t d = x.size();
  std::array<C, kPartialSums> partial{};
  std::size_t k = 0;
  for (; k + kPartialSums <= d; k += kPartialSums) {
    for (std::size_t r = 0; r < kPartialSums; ++r) {
      partial[r] = R::round(partial[r] + D::template term<T>(R::load(x[k + r]), R::load(y[k + r])));
    }
  }
  for (std::size_t r = 0; k < d; ++k, ++r) {
    partial[r] = R::round(partial[r] + D::template term<T>(R::load(x[k]), R::load(y[k])));
  }
  return combine_partials<T>(partial.data());
}

inline void check_same_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(Errc::dimension_mismatch, "vectors of dimensionality " + std::to_string(a) + " and " +
                                       std::to_string(b));
  }
}

/// ||x - y||_2^2 with every intermediate rounded to the storage width.
struct SquaredEuclidean {
  static constexpr std::string_view name = "squared_euclidean";

  template <class T>
  static compute_t<T> term(compute_t<T> x, compute_t<T> y) {
    using R = scalar_traits<T>;
    const auto diff = R::round(x - y);
    return R::round(diff * diff);
  }

  template <class T>
  compute_t<T> operator()(std::span<const T> x, std::span<const T> y) const {
    check_same_dims(x.size(), y.size());
    return separable_distance<SquaredEuclidean, T>(x, y);
  }
};

template <class T>
compute_t<T> squared_euclidean(std::span<const T> x, std::span<const T> y) {
  return SquaredEuclidean{}(x, y);
}

}  // namespace exemplar
