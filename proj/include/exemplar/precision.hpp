#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <type_traits>

#include "exemplar/error.hpp"
#include "exemplar/half.hpp"

namespace exemplar {

enum class Precision : std::uint8_t { binary16 = 0, binary32 = 1, binary64 = 2 };

constexpr std::size_t bytes_per_value(Precision p) {
  switch (p) {
    case Precision::binary16: return 2;
    case Precision::binary32: return 4;
    case Precision::binary64: return 8;
  }
  return 0;
}

constexpr std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::binary16: return "fp16";
    case Precision::binary32: return "fp32";
    case Precision::binary64: return "fp64";
  }
  return "?";
}

inline std::optional<Precision> parse_precision(std::string_view s) {
  if (s == "fp16" || s == "binary16") return Precision::binary16;
  if (s == "fp32" || s == "binary32") return Precision::binary32;
  if (s == "fp64" || s == "binary64") return Precision::binary64;
  return std::nullopt;
}

/// Per-storage-type arithmetic policy. `compute_type` is what a single
/// operation is evaluated in; `round` brings the result back onto the
/// storage grid, so every operation behaves as if done at the storage width.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Half> {
  using compute_type = float;
  using accum_type = float;  // row reductions accumulate at binary32
  static constexpr Precision precision = Precision::binary16;
  static constexpr int digits = 11;

  static float load(Half h) { return static_cast<float>(h); }
  static Half store(float x) { return Half(x); }
  static Half from_double(double x) { return Half::from_bits(Half::from_double(x)); }
  static float round(float x) { return Half::round(x); }
  static constexpr float max_finite() { return 65504.0f; }
};

template <class F>
struct float_scalar_traits {
  using compute_type = F;
  using accum_type = F;
  static constexpr int digits = std::numeric_limits<F>::digits;

  static constexpr F load(F x) { return x; }
  static constexpr F store(F x) { return x; }
  static constexpr F from_double(double x) { return static_cast<F>(x); }
  static constexpr F round(F x) { return x; }
  static constexpr F max_finite() { return std::numeric_limits<F>::max(); }
};

template <>
struct scalar_traits<float> : float_scalar_traits<float> {
  static constexpr Precision precision = Precision::binary32;
};

template <>
struct scalar_traits<double> : float_scalar_traits<double> {
  static constexpr Precision precision = Precision::binary64;
};

template <class T>
using compute_t = typename scalar_traits<T>::compute_type;

template <class T>
using accum_t = typename scalar_traits<T>::accum_type;

template <class T>
concept Scalar = requires { scalar_traits<T>::precision; };

/// Calls `fn(std::type_identity<T>{})` with the storage type matching `p`.
template <class Fn>
decltype(auto) dispatch_precision(Precision p, Fn&& fn) {
  switch (p) {
    case Precision::binary16: return fn(std::type_identity<Half>{});
    case Precision::binary32: return fn(std::type_identity<float>{});
    case Precision::binary64: return fn(std::type_identity<double>{});
  }
  fail(Errc::invalid_argument, "unknown precision tag");
}

}  // namespace exemplar
