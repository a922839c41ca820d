#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "exemplar/detail/parallel.hpp"
#include "exemplar/precision.hpp"

namespace exemplar {

/// l x n matrix of per-point partial losses; cell (j, i) = L_{v_i}(S_j u {e0}).
/// Row sums give L(S_j u {e0}).
template <class T>
class WorkMatrix {
 public:
  WorkMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T at(std::size_t j, std::size_t i) const { return cells_[j * cols_ + i]; }
  T& at(std::size_t j, std::size_t i) { return cells_[j * cols_ + i]; }
  std::span<const T> row(std::size_t j) const {
    return std::span<const T>(cells_).subspan(j * cols_, cols_);
  }
  std::span<T> row(std::size_t j) { return std::span<T>(cells_).subspan(j * cols_, cols_); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> cells_;
};

/// Sum of one row in ascending column order, at the accumulation width.
template <class T>
accum_t<T> row_sum(std::span<const T> row) {
  accum_t<T> sum{};
  for (const T& cell : row) sum += scalar_traits<T>::load(cell);
  return sum;
}

/// W * 1. Rows are distributed over workers; each row is summed in
/// ascending column order, so the result does not depend on `workers`.
template <class T>
std::vector<accum_t<T>> reduce_rows(const WorkMatrix<T>& w, std::size_t workers = 1) {
  std::vector<accum_t<T>> sums(w.rows());
  detail::parallel_for(workers, w.rows(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) sums[j] = row_sum<T>(w.row(j));
  });
  return sums;
}

}  // namespace exemplar
