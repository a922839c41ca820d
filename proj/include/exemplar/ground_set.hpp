#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exemplar/dissimilarity.hpp"
#include "exemplar/error.hpp"
#include "exemplar/precision.hpp"

namespace exemplar {

/// |V|^-1 * min_distance, rounded to the storage width. This is the value of
/// one work-matrix cell.
template <class T>
compute_t<T> normalized_loss(compute_t<T> min_distance, std::size_t n) {
  return scalar_traits<T>::round(min_distance / static_cast<compute_t<T>>(n));
}

template <class T>
T to_scalar(double value) {
  if (!std::isfinite(value)) fail(Errc::invalid_data, "non-finite input value");
  const T stored = scalar_traits<T>::from_double(value);
  if (!std::isfinite(static_cast<double>(scalar_traits<T>::load(stored)))) {
    fail(Errc::invalid_data,
         "value " + std::to_string(value) + " is not representable at " +
             std::string(to_string(scalar_traits<T>::precision)));
  }
  return stored;
}

template <class T, class D>
compute_t<T> checked_distance(const D& dis, std::span<const T> v, std::span<const T> s) {
  const compute_t<T> value = dis(v, s);
  if (std::isnan(value)) fail(Errc::invalid_data, std::string(D::name) + " returned NaN");
  assert(value >= 0 && "dissimilarity must be non-negative");
  return value;
}

/// The immutable ground set V, stored column-major: dimension k of every
/// observation is contiguous. Distances to the auxiliary vector e0 and the
/// loss L({e0}) are computed once at construction.
template <class T, class D = SquaredEuclidean>
  requires Dissimilarity<D, T>
class GroundSet {
 public:
  using value_type = T;
  using dissimilarity_type = D;
  static constexpr Precision precision = scalar_traits<T>::precision;

  /// `column_major` holds n*d values; `aux` empty means the all-zero vector.
  GroundSet(std::size_t n, std::size_t d, std::vector<T> column_major, std::vector<T> aux = {},
            D dissimilarity = {})
      : n_(n), d_(d), data_(std::move(column_major)), aux_(std::move(aux)),
        dissimilarity_(std::move(dissimilarity)) {
    if (n_ == 0) fail(Errc::empty_ground_set, "ground set needs at least one observation");
    if (d_ == 0) fail(Errc::dimension_mismatch, "observations need at least one dimension");
    if (data_.size() != n_ * d_) {
      fail(Errc::dimension_mismatch, "expected " + std::to_string(n_ * d_) + " values, got " +
                                         std::to_string(data_.size()));
    }
    if (aux_.empty()) aux_.assign(d_, scalar_traits<T>::from_double(0.0));
    check_same_dims(aux_.size(), d_);

    aux_distances_.resize(n_);
    std::vector<T> v(d_);
    accum_t<T> loss{};
    for (std::size_t i = 0; i < n_; ++i) {
      copy_vector(i, v);
      const compute_t<T> dist = checked_distance<T>(dissimilarity_, std::span<const T>(v),
                                                    std::span<const T>(aux_));
      aux_distances_[i] = scalar_traits<T>::store(dist);
      loss += normalized_loss<T>(dist, n_);
    }
    aux_loss_ = loss;
  }

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  /// Bytes per ground vector (gamma).
  std::size_t vector_bytes() const { return d_ * sizeof(T); }

  std::span<const T> data() const { return data_; }
  std::span<const T> column(std::size_t dim) const {
    return std::span<const T>(data_).subspan(dim * n_, n_);
  }
  T at(std::size_t i, std::size_t dim) const { return data_[dim * n_ + i]; }

  void copy_vector(std::size_t i, std::span<T> out) const {
    if (i >= n_) fail(Errc::index_out_of_range, "ground index " + std::to_string(i));
    for (std::size_t k = 0; k < d_; ++k) out[k] = data_[k * n_ + i];
  }
  std::vector<T> vector(std::size_t i) const {
    std::vector<T> out(d_);
    copy_vector(i, out);
    return out;
  }
  /// Row-major copy (n x d), for host-side loops that walk whole vectors.
  std::vector<T> row_major() const {
    std::vector<T> out(n_ * d_);
    for (std::size_t k = 0; k < d_; ++k)
      for (std::size_t i = 0; i < n_; ++i) out[i * d_ + k] = data_[k * n_ + i];
    return out;
  }

  std::span<const T> aux() const { return aux_; }
  std::span<const T> aux_distances() const { return aux_distances_; }
  /// L({e0}) = sum_i |V|^-1 d(v_i, e0), accumulated in ascending i.
  accum_t<T> aux_loss() const { return aux_loss_; }
  const D& dissimilarity() const { return dissimilarity_; }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<T> data_;
  std::vector<T> aux_;
  std::vector<T> aux_distances_;
  accum_t<T> aux_loss_{};
  D dissimilarity_;
};

/// Builds a ground set from row observations. `aux` defaults to the zero
/// vector. An auxiliary vector that is itself a member of V is allowed.
template <class T, class D = SquaredEuclidean>
GroundSet<T, D> build_ground_set(const std::vector<std::vector<double>>& observations,
                                 const std::optional<std::vector<double>>& aux = std::nullopt,
                                 D dissimilarity = {}) {
  if (observations.empty()) fail(Errc::empty_ground_set, "no observations");
  const std::size_t n = observations.size();
  const std::size_t d = observations.front().size();
  if (d == 0) fail(Errc::dimension_mismatch, "observations need at least one dimension");
  std::vector<T> data(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (observations[i].size() != d) {
      fail(Errc::dimension_mismatch, "observation " + std::to_string(i) + " has " +
                                         std::to_string(observations[i].size()) +
                                         " dimensions, expected " + std::to_string(d));
    }
    for (std::size_t k = 0; k < d; ++k) data[k * n + i] = to_scalar<T>(observations[i][k]);
  }
  std::vector<T> aux_values;
  if (aux) {
    check_same_dims(aux->size(), d);
    for (double x : *aux) aux_values.push_back(to_scalar<T>(x));
  }
  return GroundSet<T, D>(n, d, std::move(data), std::move(aux_values), std::move(dissimilarity));
}

/// Builds a ground set from an already column-major value buffer.
template <class T, class D = SquaredEuclidean>
GroundSet<T, D> ground_set_from_columns(std::size_t n, std::size_t d,
                                        std::span<const double> column_major,
                                        D dissimilarity = {}) {
  if (n == 0) fail(Errc::empty_ground_set, "no observations");
  if (column_major.size() != n * d) fail(Errc::dimension_mismatch, "buffer size is not n*d");
  std::vector<T> data(column_major.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = to_scalar<T>(column_major[i]);
  return GroundSet<T, D>(n, d, std::move(data), {}, std::move(dissimilarity));
}

}  // namespace exemplar
