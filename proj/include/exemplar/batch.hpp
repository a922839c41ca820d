#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exemplar/device.hpp"
#include "exemplar/error.hpp"
#include "exemplar/ground_set.hpp"
#include "exemplar/precision.hpp"

namespace exemplar {

/// The multiset S_multi = {S_1, ..., S_l}. Each set carries its own vectors,
/// stored row-major one after another.
template <class T>
class EvaluationBatch {
 public:
  using value_type = T;

  explicit EvaluationBatch(std::size_t d) : d_(d) {
    if (d_ == 0) fail(Errc::dimension_mismatch, "evaluation vectors need at least one dimension");
  }

  /// Appends a set given as `count` row-major vectors.
  void add_set(std::span<const T> row_major, std::size_t count) {
    if (count == 0) fail(Errc::empty_evaluation_set, "evaluation sets need at least one element");
    if (row_major.size() != count * d_) {
      fail(Errc::dimension_mismatch, "set of " + std::to_string(count) + " vectors needs " +
                                         std::to_string(count * d_) + " values");
    }
    offsets_.push_back(values_.size() / d_);
    cardinalities_.push_back(count);
    values_.insert(values_.end(), row_major.begin(), row_major.end());
    k_max_ = std::max(k_max_, count);
  }

  void add_set(const std::vector<std::vector<T>>& vectors) {
    std::vector<T> flat;
    flat.reserve(vectors.size() * d_);
    for (const auto& v : vectors) {
      check_same_dims(v.size(), d_);
      flat.insert(flat.end(), v.begin(), v.end());
    }
    add_set(flat, vectors.size());
  }

  /// Builds a batch from nested doubles, converting to the storage width.
  static EvaluationBatch from_values(const std::vector<std::vector<std::vector<double>>>& sets) {
    if (sets.empty() || sets.front().empty()) {
      fail(Errc::empty_evaluation_set, "batch needs at least one non-empty set");
    }
    EvaluationBatch batch(sets.front().front().size());
    for (const auto& set : sets) {
      std::vector<T> flat;
      for (const auto& v : set) {
        check_same_dims(v.size(), batch.d());
        for (double x : v) flat.push_back(to_scalar<T>(x));
      }
      batch.add_set(flat, set.size());
    }
    return batch;
  }

  std::size_t l() const { return cardinalities_.size(); }
  std::size_t d() const { return d_; }
  std::size_t k_max() const { return k_max_; }
  std::span<const std::size_t> cardinalities() const { return cardinalities_; }
  std::size_t cardinality(std::size_t j) const { return cardinalities_.at(j); }

  /// Row-major values of set j (cardinality(j) x d).
  std::span<const T> set(std::size_t j) const {
    return std::span<const T>(values_).subspan(offsets_.at(j) * d_, cardinalities_[j] * d_);
  }
  std::span<const T> element(std::size_t j, std::size_t e) const {
    if (e >= cardinality(j)) fail(Errc::index_out_of_range, "element " + std::to_string(e));
    return set(j).subspan(e * d_, d_);
  }

  /// Contiguous sub-batch of sets [first, first + count).
  EvaluationBatch slice(std::size_t first, std::size_t count) const {
    if (first + count > l()) fail(Errc::index_out_of_range, "batch slice out of range");
    EvaluationBatch out(d_);
    for (std::size_t j = first; j < first + count; ++j) out.add_set(set(j), cardinalities_[j]);
    return out;
  }

 private:
  std::size_t d_;
  std::size_t k_max_ = 0;
  std::vector<T> values_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cardinalities_;
};

struct PackedShape {
  std::size_t l = 0;
  std::size_t k_max = 0;
  std::size_t d = 0;

  std::size_t size() const { return l * k_max * d; }
};

/// Offset of (set j, element e, dimension dim) in the packed buffer:
/// sets are interleaved round-robin, the interleaved matrix is vectorized
/// row by row (dimension-major).
inline std::size_t packed_address(const PackedShape& shape, std::size_t j, std::size_t e,
                                  std::size_t dim) {
  if (j >= shape.l || e >= shape.k_max || dim >= shape.d) {
    fail(Errc::index_out_of_range, "packed index (" + std::to_string(j) + ", " +
                                       std::to_string(e) + ", " + std::to_string(dim) + ")");
  }
  return dim * (shape.k_max * shape.l) + e * shape.l + j;
}

/// Offset of the same slot when each set is one contiguous k_max x d block.
inline std::size_t contiguous_address(const PackedShape& shape, std::size_t j, std::size_t e,
                                      std::size_t dim) {
  if (j >= shape.l || e >= shape.k_max || dim >= shape.d) {
    fail(Errc::index_out_of_range, "contiguous index out of range");
  }
  return j * (shape.k_max * shape.d) + e * shape.d + dim;
}

/// Round-robin interleaved, padded evaluation sets. Slots past a set's
/// cardinality are zero and never contribute to a result.
template <class T>
class PackedBatch {
 public:
  using value_type = T;

  PackedBatch(PackedShape shape, std::vector<std::size_t> cardinalities, std::vector<T> values)
      : shape_(shape), cardinalities_(std::move(cardinalities)), values_(std::move(values)) {
    if (values_.size() != shape_.size()) fail(Errc::dimension_mismatch, "packed buffer size");
    if (cardinalities_.size() != shape_.l) fail(Errc::dimension_mismatch, "cardinality count");
    for (std::size_t c : cardinalities_) {
      if (c == 0 || c > shape_.k_max) fail(Errc::invalid_data, "cardinality out of range");
    }
  }

  const PackedShape& shape() const { return shape_; }
  std::size_t l() const { return shape_.l; }
  std::size_t k_max() const { return shape_.k_max; }
  std::size_t d() const { return shape_.d; }
  std::span<const std::size_t> cardinalities() const { return cardinalities_; }
  std::span<const T> values() const { return values_; }
  std::size_t bytes() const { return values_.size() * sizeof(T); }

  T at(std::size_t j, std::size_t e, std::size_t dim) const {
    return values_[packed_address(shape_, j, e, dim)];
  }
  bool is_blank(std::size_t j, std::size_t e) const { return e >= cardinalities_.at(j); }

  std::size_t blank_count() const {
    std::size_t blanks = 0;
    for (std::size_t c : cardinalities_) blanks += shape_.k_max - c;
    return blanks * shape_.d;
  }

 private:
  PackedShape shape_;
  std::vector<std::size_t> cardinalities_;
  std::vector<T> values_;
};

template <class T>
PackedBatch<T> pack_batch(const EvaluationBatch<T>& batch) {
  const PackedShape shape{batch.l(), batch.k_max(), batch.d()};
  std::vector<T> values(shape.size(), scalar_traits<T>::from_double(0.0));
  for (std::size_t j = 0; j < shape.l; ++j) {
    const auto set = batch.set(j);
    for (std::size_t e = 0; e < batch.cardinality(j); ++e)
      for (std::size_t dim = 0; dim < shape.d; ++dim)
        values[dim * (shape.k_max * shape.l) + e * shape.l + j] = set[e * shape.d + dim];
  }
  return PackedBatch<T>(shape, {batch.cardinalities().begin(), batch.cardinalities().end()},
                        std::move(values));
}

/// Byte accesses of a warp whose lanes read slot (e, dim) of sets
/// first_set, first_set + 1, ... under the packed layout.
inline std::vector<LaneAccess> packed_warp_accesses(const PackedShape& shape, std::size_t first_set,
                                                    std::size_t lanes, std::size_t e,
                                                    std::size_t dim, std::size_t value_bytes) {
  std::vector<LaneAccess> out;
  for (std::size_t t = 0; t < lanes; ++t) {
    out.push_back({packed_address(shape, first_set + t, e, dim) * value_bytes, value_bytes});
  }
  return out;
}

/// Same warp load under the per-set-contiguous layout.
inline std::vector<LaneAccess> contiguous_warp_accesses(const PackedShape& shape,
                                                        std::size_t first_set, std::size_t lanes,
                                                        std::size_t e, std::size_t dim,
                                                        std::size_t value_bytes) {
  std::vector<LaneAccess> out;
  for (std::size_t t = 0; t < lanes; ++t) {
    out.push_back({contiguous_address(shape, first_set + t, e, dim) * value_bytes, value_bytes});
  }
  return out;
}

/// Lanes reading dimension dim of ground vectors first, first + 1, ... from
/// the column-major ground buffer.
inline std::vector<LaneAccess> ground_warp_accesses(std::size_t n, std::size_t first,
                                                    std::size_t lanes, std::size_t dim,
                                                    std::size_t value_bytes) {
  std::vector<LaneAccess> out;
  for (std::size_t t = 0; t < lanes; ++t) {
    if (first + t >= n) fail(Errc::index_out_of_range, "ground index");
    out.push_back({(dim * n + first + t) * value_bytes, value_bytes});
  }
  return out;
}

}  // namespace exemplar
