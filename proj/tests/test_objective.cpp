#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "exemplar/exemplar.hpp"
#include "oracle.hpp"

using namespace exemplar;

namespace {

template <class T>
VectorSet<T> to_set(const oracle::Set& rows) {
  VectorSet<T> out;
  for (const auto& r : rows) {
    std::vector<T> v;
    for (double x : r) v.push_back(scalar_traits<T>::from_double(x));
    out.push_back(v);
  }
  return out;
}

template <class T>
std::span<const std::vector<T>> view(const VectorSet<T>& s) {
  return s;
}

// Random subset of V given as indices.
std::vector<std::size_t> random_indices(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution keep(p);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep(rng)) out.push_back(i);
  return out;
}

template <class T, class D>
VectorSet<T> pick(const GroundSet<T, D>& g, const std::vector<std::size_t>& idx) {
  VectorSet<T> out;
  for (std::size_t i : idx) out.push_back(g.vector(i));
  return out;
}

const oracle::Set kLine{{1}, {3}};

}  // namespace

TEST(SquaredEuclidean, Examples) {
  const std::vector<double> z{0, 0}, a{1, 2}, b{3, 4}, c{0}, e{2};
  EXPECT_EQ(squared_euclidean<double>(z, z), 0.0);
  EXPECT_EQ(squared_euclidean<double>(a, b), 8.0);
  EXPECT_EQ(squared_euclidean<double>(c, e), 4.0);
  EXPECT_THROW(squared_euclidean<double>(a, c), Error);
  EXPECT_EQ(static_cast<double>(oracle::sqdist({1, 2}, {3, 4})), 8.0);
}

TEST(SquaredEuclidean, MatchesOracleAcrossPrecisions) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 1 + rng() % 70;
    const auto xy = oracle::random_rows(rng, 2, d);
    const double expect = static_cast<double>(oracle::sqdist(xy[0], xy[1]));
    const auto x64 = xy[0], y64 = xy[1];
    EXPECT_NEAR(squared_euclidean<double>(x64, y64), expect, 1e-14 * (1 + expect));
    const auto s32 = to_set<float>(xy);
    const double o32 = static_cast<double>(oracle::sqdist(
        std::vector<double>(s32[0].begin(), s32[0].end()), std::vector<double>(s32[1].begin(), s32[1].end())));
    EXPECT_NEAR(squared_euclidean<float>(s32[0], s32[1]), o32, 1e-5 * (1 + o32));
    EXPECT_GE(squared_euclidean<float>(s32[0], s32[1]), 0.0f);
  }
}

TEST(KMedoidsLoss, Examples) {
  const auto g = build_ground_set<double>(kLine);
  EXPECT_EQ(kmedoids_loss(g, view(to_set<double>({{0}}))), 5.0);
  EXPECT_EQ(kmedoids_loss(g, view(to_set<double>(kLine))), 0.0);
  const auto g2 = build_ground_set<double>({{0}, {2}});
  EXPECT_EQ(kmedoids_loss(g2, view(to_set<double>({{0}}))), 2.0);
  EXPECT_EQ(static_cast<double>(oracle::kmedoids(kLine, {{0}})), 5.0);
  try {
    kmedoids_loss(g, view(VectorSet<double>{}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_evaluation_set);
  }
}

TEST(ExemplarValue, Examples) {
  const auto g = build_ground_set<double>(kLine, std::vector<double>{0});
  EXPECT_EQ(exemplar_value(g, view(VectorSet<double>{})), 0.0);
  EXPECT_EQ(exemplar_value(g, view(to_set<double>({{3}}))), 4.5);
  EXPECT_EQ(exemplar_value(g, view(to_set<double>(kLine))), 5.0);
  EXPECT_EQ(static_cast<double>(oracle::exemplar(kLine, {{3}}, {0})), 4.5);
  EXPECT_THROW(exemplar_value(g, view(to_set<double>({{1, 2}}))), Error);
}

TEST(ExemplarValue, EmptySetIsExactlyZero) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rows = oracle::random_rows(rng, 1 + rng() % 50, 1 + rng() % 10);
    EXPECT_EQ(exemplar_value(build_ground_set<Half>(rows), view(VectorSet<Half>{})), 0.0f);
    EXPECT_EQ(exemplar_value(build_ground_set<float>(rows), view(VectorSet<float>{})), 0.0f);
    EXPECT_EQ(exemplar_value(build_ground_set<double>(rows), view(VectorSet<double>{})), 0.0);
  }
}

TEST(PointLoss, Examples) {
  const auto g = build_ground_set<double>(kLine);
  const auto s = to_set<double>({{3}});
  EXPECT_EQ(point_loss(g, 0, view(s)), 0.5);
  EXPECT_EQ(point_loss(g, 1, view(s)), 0.0);
  try {
    point_loss(g, 2, view(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::index_out_of_range);
  }
}

TEST(PointLoss, DecompositionIdentity) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = oracle::random_rows(rng, 2 + rng() % 60, 1 + rng() % 12);
    const auto aux = oracle::random_rows(rng, 1, rows[0].size())[0];
    const auto set_rows = oracle::random_rows(rng, 1 + rng() % 5, rows[0].size());

    const auto g64 = build_ground_set<double>(rows, aux);
    auto s64 = to_set<double>(set_rows);
    double sum64 = 0;
    for (std::size_t i = 0; i < g64.n(); ++i) sum64 += point_loss(g64, i, view(s64));
    s64.push_back(aux);
    EXPECT_EQ(sum64, kmedoids_loss(g64, view(s64)));

    const auto g32 = build_ground_set<float>(rows, aux);
    auto s32 = to_set<float>(set_rows);
    float sum32 = 0;
    for (std::size_t i = 0; i < g32.n(); ++i) sum32 += point_loss(g32, i, view(s32));
    s32.push_back(std::vector<float>(g32.aux().begin(), g32.aux().end()));
    const float whole = kmedoids_loss(g32, view(s32));
    EXPECT_NEAR(sum32, whole, 1e-5 * std::abs(whole));
  }
}

TEST(MarginalGain, Examples) {
  const auto g = build_ground_set<double>(kLine, std::vector<double>{0});
  EXPECT_EQ(marginal_gain(g, view(VectorSet<double>{}), {3}), 4.5);
  EXPECT_EQ(marginal_gain(g, view(to_set<double>({{3}})), {3}), 0.0);
  EXPECT_EQ(marginal_gain(g, view(to_set<double>({{3}})), {1}), 0.5);
  EXPECT_THROW(marginal_gain(g, view(VectorSet<double>{}), {1, 1}), Error);
}

TEST(ExemplarValue, MatchesOracle) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = oracle::random_rows(rng, 1 + rng() % 40, 1 + rng() % 8);
    const auto aux = oracle::random_rows(rng, 1, rows[0].size())[0];
    const auto set_rows = oracle::random_rows(rng, 1 + rng() % 6, rows[0].size());
    const auto g = build_ground_set<double>(rows, aux);
    const double expect = static_cast<double>(oracle::exemplar(rows, set_rows, aux));
    const double got = exemplar_value(g, view(to_set<double>(set_rows)));
    EXPECT_NEAR(got, expect, 1e-12 * std::max(1.0, std::abs(expect)));
    EXPECT_GE(got, -1e-15);
  }
}

TEST(ExemplarValue, MonotoneAndSubmodular) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    const auto g = build_ground_set<double>(oracle::random_rows(rng, n, 1 + rng() % 6));
    const auto b_idx = random_indices(rng, n, 0.6);
    std::vector<std::size_t> a_idx;
    for (std::size_t i : b_idx)
      if (rng() % 2) a_idx.push_back(i);
    const auto a = pick(g, a_idx), b = pick(g, b_idx);
    const double fa = exemplar_value(g, view(a)), fb = exemplar_value(g, view(b));
    EXPECT_LE(fa, fb + 1e-12 * std::max(1.0, std::abs(fb)));

    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < n; ++i)
      if (std::find(b_idx.begin(), b_idx.end(), i) == b_idx.end()) outside.push_back(i);
    if (outside.empty()) continue;
    const auto e = g.vector(outside[rng() % outside.size()]);
    EXPECT_GE(marginal_gain(g, view(a), e), marginal_gain(g, view(b), e) - 1e-12);
  }
}

TEST(ExemplarValue, MaximumAtFullSet) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto g = build_ground_set<double>(oracle::random_rows(rng, n, 1 + rng() % 4));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double full = exemplar_value(g, view(pick(g, all)));
    EXPECT_EQ(full, g.aux_loss());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) idx.push_back(i);
      EXPECT_LE(exemplar_value(g, view(pick(g, idx))), full);
    }
  }
}

struct Manhattan {
  static constexpr std::string_view name = "manhattan";
  template <class T>
  compute_t<T> operator()(std::span<const T> x, std::span<const T> y) const {
    compute_t<T> s{};
    for (std::size_t k = 0; k < x.size(); ++k)
      s = scalar_traits<T>::round(s + std::abs(scalar_traits<T>::load(x[k]) - scalar_traits<T>::load(y[k])));
    return s;
  }
};

TEST(Dissimilarity, CustomFunction) {
  const auto g = build_ground_set<double, Manhattan>(kLine, std::vector<double>{0});
  EXPECT_EQ(g.aux_loss(), 2.0);
  EXPECT_EQ(exemplar_value(g, view(to_set<double>({{3}}))), 1.5);
}

struct AlwaysNaN {
  static constexpr std::string_view name = "nan";
  template <class T>
  compute_t<T> operator()(std::span<const T>, std::span<const T>) const {
    return std::numeric_limits<compute_t<T>>::quiet_NaN();
  }
};

TEST(Dissimilarity, NaNIsRejected) {
  EXPECT_THROW((build_ground_set<double, AlwaysNaN>(kLine)), Error);
}
