#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "exemplar/batch.hpp"
#include "exemplar/detail/parallel.hpp"
#include "exemplar/ground_set.hpp"
#include "exemplar/work_matrix.hpp"

namespace exemplar {

namespace detail {

template <class T, class D>
T work_cell(const D& dis, std::span<const T> v, std::span<const T> set_rows, std::size_t d,
            compute_t<T> aux_distance, std::size_t n) {
  compute_t<T> nearest = scalar_traits<T>::max_finite();
  const std::size_t members = set_rows.size() / d;
  for (std::size_t e = 0; e < members; ++e) {
    nearest = std::min(nearest, checked_distance<T>(dis, v, set_rows.subspan(e * d, d)));
  }
  return scalar_traits<T>::store(normalized_loss<T>(std::min(nearest, aux_distance), n));
}

}  // namespace detail

/// Host-parallel backend. With at least as many sets as workers, each worker
/// owns whole work-matrix rows; otherwise every row is split into column
/// blocks. Rows are always reduced in ascending column order, so results are
/// identical for every worker count.
template <class T, class D>
std::vector<accum_t<T>> evaluate_parallel(const GroundSet<T, D>& ground,
                                          const EvaluationBatch<T>& batch, std::size_t workers) {
  check_same_dims(batch.d(), ground.d());
  if (workers == 0) fail(Errc::invalid_argument, "worker count must be positive");
  const std::size_t n = ground.n();
  const std::size_t d = ground.d();
  const std::size_t l = batch.l();
  const auto rows = ground.row_major();
  const std::span<const T> ground_rows(rows);
  const auto aux = ground.aux_distances();
  const auto& dis = ground.dissimilarity();
  std::vector<accum_t<T>> out(l);

  auto fill_cells = [&](std::size_t j, std::size_t col_begin, std::size_t col_end,
                        std::span<T> cells) {
    const auto set_rows = batch.set(j);
    for (std::size_t i = col_begin; i < col_end; ++i) {
      cells[i] = detail::work_cell<T>(dis, ground_rows.subspan(i * d, d), set_rows, d,
                                      scalar_traits<T>::load(aux[i]), n);
    }
  };

  if (l >= workers) {
    detail::parallel_for(workers, l, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<T> row(n);
      for (std::size_t j = begin; j < end; ++j) {
        fill_cells(j, 0, n, row);
        out[j] = ground.aux_loss() - row_sum<T>(row);
      }
    });
  } else {
    WorkMatrix<T> w(l, n);
    detail::parallel_for(workers, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t block = begin; block < end; ++block) {
        const std::size_t col_begin = n * block / workers;
        const std::size_t col_end = n * (block + 1) / workers;
        for (std::size_t j = 0; j < l; ++j) fill_cells(j, col_begin, col_end, w.row(j));
      }
    });
    for (std::size_t j = 0; j < l; ++j) out[j] = ground.aux_loss() - row_sum<T>(w.row(j));
  }
  return out;
}

}  // namespace exemplar
