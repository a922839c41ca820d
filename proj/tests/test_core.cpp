#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "exemplar/exemplar.hpp"
#include "oracle.hpp"

using namespace exemplar;

namespace {

template <class T>
EvaluationBatch<T> random_batch(std::mt19937_64& rng, std::size_t l, std::size_t k_max,
                                std::size_t d) {
  std::uniform_int_distribution<std::size_t> card(1, k_max);
  std::vector<std::vector<std::vector<double>>> sets(l);
  for (auto& s : sets) s = oracle::random_rows(rng, card(rng), d);
  return EvaluationBatch<T>::from_values(sets);
}

}  // namespace

// ---------------------------------------------------------------- ground set

TEST(GroundSet, AuxDistancesOneDim) {
  const auto g = build_ground_set<double>({{1}, {3}}, std::vector<double>{0});
  ASSERT_EQ(g.n(), 2u);
  EXPECT_EQ(g.aux_distances()[0], 1.0);
  EXPECT_EQ(g.aux_distances()[1], 9.0);
  EXPECT_EQ(g.aux_loss(), 5.0);
  EXPECT_EQ(static_cast<double>(oracle::kmedoids({{1}, {3}}, {{0}})), 5.0);
}

TEST(GroundSet, SingleObservationAtAux) {
  const auto g = build_ground_set<float>({{0}});
  EXPECT_EQ(g.aux_distances()[0], 0.0f);
  EXPECT_EQ(g.aux_loss(), 0.0f);
}

TEST(GroundSet, DefaultAuxIsZero) {
  const auto g = build_ground_set<double>({{0, 0}, {2, 0}});
  EXPECT_EQ(g.aux_loss(), 2.0);
  EXPECT_EQ(static_cast<double>(oracle::kmedoids({{0, 0}, {2, 0}}, {{0, 0}})), 2.0);
  EXPECT_EQ(std::vector<double>(g.aux().begin(), g.aux().end()), (std::vector<double>{0, 0}));
}

TEST(GroundSet, StoresColumnMajor) {
  const auto g = build_ground_set<float>({{1, 2, 3}, {4, 5, 6}});
  const std::vector<float> expected{1, 4, 2, 5, 3, 6};
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), g.data().begin()));
  EXPECT_EQ(g.vector(1), (std::vector<float>{4, 5, 6}));
  EXPECT_EQ(g.row_major(), (std::vector<float>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(g.vector_bytes(), 12u);
}

TEST(GroundSet, Errors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_argument;  // sentinel: nothing thrown
  };
  EXPECT_EQ(code([] { build_ground_set<float>({{1, 2}, {3}}); }), Errc::dimension_mismatch);
  EXPECT_EQ(code([] { build_ground_set<float>({}); }), Errc::empty_ground_set);
  EXPECT_EQ(code([] { build_ground_set<float>({{1, std::nan("")}}); }), Errc::invalid_data);
  EXPECT_EQ(code([] { build_ground_set<float>({{INFINITY}}); }), Errc::invalid_data);
  EXPECT_EQ(code([] { build_ground_set<Half>({{1e6}}); }), Errc::invalid_data);
  EXPECT_EQ(code([] { build_ground_set<float>({{1, 2}}, std::vector<double>{0}); }),
            Errc::dimension_mismatch);
  EXPECT_EQ(code([] { build_ground_set<float>({{1}}).vector(1); }), Errc::index_out_of_range);
}

TEST(GroundSet, AuxLossIsMeanOfAuxDistances) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rows = oracle::random_rows(rng, 1 + rng() % 200, 1 + rng() % 16);
    const auto g32 = build_ground_set<float>(rows);
    const auto g16 = build_ground_set<Half>(rows);
    for (std::size_t i = 0; i < g32.n(); ++i) EXPECT_GE(g32.aux_distances()[i], 0.0f);
    auto mean = [](auto span) {
      long double s = 0;
      for (auto x : span) s += static_cast<float>(x);
      return static_cast<double>(s / span.size());
    };
    const double n = static_cast<double>(g32.n());
    EXPECT_NEAR(g32.aux_loss(), mean(g32.aux_distances()), 0x1p-23 * n * g32.aux_loss());
    EXPECT_NEAR(g16.aux_loss(), mean(g16.aux_distances()), 0x1p-10 * g16.aux_loss() + 1e-6);
  }
}

// ----------------------------------------------------------------- packing

TEST(Packing, ThreeUnevenSets) {
  std::mt19937_64 rng(1);
  std::vector<std::vector<std::vector<double>>> sets{oracle::random_rows(rng, 4, 2),
                                                     oracle::random_rows(rng, 3, 2),
                                                     oracle::random_rows(rng, 5, 2)};
  const auto packed = pack_batch(EvaluationBatch<float>::from_values(sets));
  EXPECT_EQ(packed.values().size(), 30u);
  EXPECT_EQ(packed.blank_count(), 6u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(packed.values().begin(), packed.values().end(), 0.0f)), 6u);
}

TEST(Packing, SingleElement) {
  const auto packed = pack_batch(EvaluationBatch<double>::from_values({{{7}}}));
  EXPECT_EQ(packed.values().size(), 1u);
  EXPECT_EQ(packed.blank_count(), 0u);
  EXPECT_EQ(packed.values()[0], 7.0);
}

TEST(Packing, RoundRobinInterleave) {
  const auto packed = pack_batch(EvaluationBatch<double>::from_values({{{10}, {11}}, {{20}, {21}}}));
  const std::vector<double> expected{10, 20, 11, 21};
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), packed.values().begin()));
}

TEST(Packing, AddressExamples) {
  EXPECT_EQ(packed_address({1, 1, 1}, 0, 0, 0), 0u);
  EXPECT_EQ(packed_address({3, 5, 2}, 2, 4, 1), 29u);
  EXPECT_EQ(packed_address({3, 5, 1}, 1, 2, 0), 7u);
  EXPECT_THROW(packed_address({3, 5, 2}, 3, 0, 0), Error);
  EXPECT_THROW(packed_address({3, 5, 2}, 0, 5, 0), Error);
  EXPECT_THROW(packed_address({3, 5, 2}, 0, 0, 2), Error);
}

TEST(Packing, AddressIsBijection) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const PackedShape shape{1 + rng() % 9, 1 + rng() % 7, 1 + rng() % 5};
    std::vector<int> hits(shape.size(), 0);
    for (std::size_t j = 0; j < shape.l; ++j)
      for (std::size_t e = 0; e < shape.k_max; ++e)
        for (std::size_t dim = 0; dim < shape.d; ++dim) ++hits.at(packed_address(shape, j, e, dim));
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

template <class T>
void check_round_trip(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 40; ++trial) {
    const auto batch = random_batch<T>(rng, 1 + rng() % 12, 1 + rng() % 6, 1 + rng() % 5);
    const auto packed = pack_batch(batch);
    EXPECT_EQ(packed.blank_count(),
              batch.d() * std::accumulate(batch.cardinalities().begin(), batch.cardinalities().end(),
                                          std::size_t{0}, [&](std::size_t acc, std::size_t c) {
                                            return acc + batch.k_max() - c;
                                          }));
    for (std::size_t j = 0; j < batch.l(); ++j)
      for (std::size_t e = 0; e < batch.cardinality(j); ++e)
        for (std::size_t dim = 0; dim < batch.d(); ++dim)
          ASSERT_TRUE(packed.at(j, e, dim) == batch.element(j, e)[dim]);
  }
}

TEST(Packing, RoundTripIsBitExact) {
  check_round_trip<Half>(3);
  check_round_trip<float>(4);
  check_round_trip<double>(5);
}

TEST(Packing, HalfBufferIsHalfTheSize) {
  std::mt19937_64 rng(6);
  const auto rows = oracle::random_rows(rng, 6, 4);
  const auto p16 = pack_batch(EvaluationBatch<Half>::from_values({rows, rows}));
  const auto p32 = pack_batch(EvaluationBatch<float>::from_values({rows, rows}));
  EXPECT_EQ(2 * p16.bytes(), p32.bytes());
}

TEST(Batch, Errors) {
  EvaluationBatch<float> batch(2);
  EXPECT_THROW(batch.add_set(std::vector<float>{}, 0), Error);
  EXPECT_THROW(batch.add_set(std::vector<float>{1, 2, 3}, 2), Error);
  try {
    EvaluationBatch<float>::from_values({{{1, 2}}, {{1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
}

// ---------------------------------------------------------- kernel config

TEST(KernelConfig, LargeBatch) {
  const auto c = compute_kernel_config(50000, 5000, 400);
  EXPECT_EQ(c.block, (Dim3{1, 1024, 1}));
  EXPECT_EQ(c.grid, (Dim3{50000, 5, 1}));
}

TEST(KernelConfig, SingleSet) {
  const auto c = compute_kernel_config(1000, 1, 400);
  EXPECT_EQ(c.block, (Dim3{122, 1, 1}));
  EXPECT_EQ(c.grid, (Dim3{9, 1, 1}));
  EXPECT_EQ(c.shared_bytes_per_block, 122u * 400u);
}

TEST(KernelConfig, ManySets) {
  const auto c = compute_kernel_config(64, 2048, 4);
  EXPECT_EQ(c.block, (Dim3{1, 1024, 1}));
  EXPECT_EQ(c.grid, (Dim3{64, 2, 1}));
}

TEST(KernelConfig, SharedMemoryOverflow) {
  try {
    compute_kernel_config(10, 10, 49153);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::shared_memory_overflow);
  }
}

TEST(KernelConfig, CoversWorkMatrix) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5000; ++trial) {
    DeviceLimits limits;
    limits.shared_memory_bytes = 1 + rng() % 100000;
    const std::size_t n = 1 + rng() % 100000;
    const std::size_t l = 1 + rng() % 10000;
    const std::size_t gamma = 1 + rng() % 2000;
    if (gamma > limits.shared_memory_bytes) {
      EXPECT_THROW(compute_kernel_config(n, l, gamma, limits), Error);
      continue;
    }
    const auto c = compute_kernel_config(n, l, gamma, limits);
    EXPECT_GE(c.grid.x * c.block.x, n);
    EXPECT_GE(c.grid.y * c.block.y, l);
    EXPECT_LE(c.block.x * c.block.y, 1024u);
    EXPECT_LE(c.block.x * gamma, limits.shared_memory_bytes);
    EXPECT_EQ(c.block.z, 1u);
    EXPECT_EQ(c.grid.z, 1u);
  }
}

TEST(DeviceLimits, Validation) {
  DeviceLimits bad;
  bad.warp_size = 48;
  EXPECT_THROW(bad.validate(), Error);
  bad = {};
  bad.segment_bytes = 0;
  EXPECT_THROW(bad.validate(), Error);
  EXPECT_NO_THROW(DeviceLimits{}.validate());
}

// ----------------------------------------------------------- coalescing

TEST(Coalescing, SequentialVersusStrided) {
  const std::vector<LaneAccess> sequential{{0, 8}, {8, 8}, {16, 8}, {24, 8}};
  const std::vector<LaneAccess> strided{{0, 8}, {32, 8}, {64, 8}, {96, 8}};
  EXPECT_EQ(count_transactions(sequential), 1u);
  EXPECT_EQ(count_transactions(strided), 4u);
}

TEST(Coalescing, FullWarpOfFloats) {
  std::vector<LaneAccess> lanes;
  for (std::uint64_t t = 0; t < 32; ++t) lanes.push_back({4 * t, 4});
  EXPECT_EQ(count_transactions(lanes), 4u);
  EXPECT_EQ(count_transactions({}), 0u);
  lanes.push_back({200, 4});
  EXPECT_THROW(count_transactions(lanes), Error);
  EXPECT_EQ(count_transactions(std::vector<LaneAccess>{{30, 4}}), 2u);  // straddles
}

TEST(Coalescing, PackedLayoutNeverWorse) {
  std::mt19937_64 rng(8);
  const std::size_t widths[] = {2, 4, 8};
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t bytes = widths[rng() % 3];
    const std::size_t w = 1 + rng() % 32;
    const PackedShape shape{w + rng() % 40, 1 + rng() % 8, 1 + rng() % 8};
    const std::size_t j0 = rng() % (shape.l - w + 1);
    const std::size_t e = rng() % shape.k_max;
    const std::size_t dim = rng() % shape.d;
    const auto packed = count_transactions(packed_warp_accesses(shape, j0, w, e, dim, bytes));
    const auto contiguous = count_transactions(contiguous_warp_accesses(shape, j0, w, e, dim, bytes));
    EXPECT_LE(packed, contiguous);
    const bool aligned = packed_address(shape, j0, e, dim) * bytes % 32 == 0;
    if (aligned && w > 1 && shape.k_max * shape.d * bytes > 32) {
      EXPECT_LT(packed, contiguous);
    }
  }
}

TEST(Coalescing, ColumnMajorGroundReads) {
  std::mt19937_64 rng(9);
  const std::size_t widths[] = {2, 4, 8};
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t bytes = widths[rng() % 3];
    const std::size_t w = 1 + rng() % 32;
    const std::size_t n = w + rng() % 100;
    const std::size_t first = rng() % (n - w + 1);
    const std::size_t dim = rng() % 6;
    const auto count = count_transactions(ground_warp_accesses(n, first, w, dim, bytes));
    const std::size_t ideal = (w * bytes + 31) / 32;
    if ((dim * n + first) * bytes % 32 == 0) {
      EXPECT_EQ(count, ideal);
    } else {
      EXPECT_LE(count, ideal + 1);
    }
  }
}
