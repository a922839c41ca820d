#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace exemplar {

/// IEEE 754 binary16 storage type with software round-to-nearest-even
/// conversion. Arithmetic is performed in float and rounded back, which is
/// exact for +, -, * and / because float carries more than 2p+2 bits.
class Half {
 public:
  constexpr Half() = default;
  explicit Half(float value) : bits_(from_float(value)) {}
  explicit Half(double value) : bits_(from_double(value)) {}

  static constexpr Half from_bits(std::uint16_t bits) {
    Half h;
    h.bits_ = bits;
    return h;
  }

  constexpr std::uint16_t bits() const { return bits_; }

  explicit operator float() const { return to_float(bits_); }
  explicit operator double() const { return to_float(bits_); }

  friend constexpr bool operator==(Half a, Half b) { return a.bits_ == b.bits_; }

  static std::uint16_t from_float(float value) {
    constexpr std::uint32_t f32_infinity = 255u << 23;
    constexpr std::uint32_t f16_overflow = (127u + 16u) << 23;  // 2^16
    constexpr std::uint32_t denorm_magic_bits = ((127u - 15u) + (23u - 10u) + 1u) << 23;

    std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    const std::uint32_t sign = u & 0x80000000u;
    u ^= sign;

    std::uint32_t out;
    if (u >= f16_overflow) {
      out = u > f32_infinity ? 0x7e00u : 0x7c00u;
    } else if (u < (113u << 23)) {
      // Below 2^-14: adding 0.5 lets the FPU round to a multiple of 2^-24.
      const float shifted = std::bit_cast<float>(u) + std::bit_cast<float>(denorm_magic_bits);
      out = std::bit_cast<std::uint32_t>(shifted) - denorm_magic_bits;
    } else {
      const std::uint32_t mant_odd = (u >> 13) & 1u;
      u += (static_cast<std::uint32_t>(15 - 127) << 23) + 0xfffu;
      u += mant_odd;
      out = u >> 13;
    }
    return static_cast<std::uint16_t>(out | (sign >> 16));
  }

  /// Correctly rounded double -> binary16. The intermediate float is rounded
  /// to odd so that the second rounding cannot land on a false tie.
  static std::uint16_t from_double(double value) {
    float f = static_cast<float>(value);
    if (std::isfinite(f) && static_cast<double>(f) != value) {
      std::uint32_t u = std::bit_cast<std::uint32_t>(f);
      if ((u & 1u) == 0) {
        const bool too_big = std::fabs(static_cast<double>(f)) > std::fabs(value);
        u = too_big ? u - 1 : u + 1;
        f = std::bit_cast<float>(u);
      }
    }
    return from_float(f);
  }

  static float to_float(std::uint16_t h) {
    // Select-only formulation so loops over half buffers vectorize.
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t shifted = static_cast<std::uint32_t>(h & 0x7fffu) << 13;
    const std::uint32_t exponent = shifted & 0x0f800000u;
    constexpr std::uint32_t magic = 113u << 23;
    // zero or subnormal: (1 + m/1024) 2^-14 - 2^-14 = m 2^-24, exact
    const std::uint32_t subnormal =
        std::bit_cast<std::uint32_t>(std::bit_cast<float>(shifted + magic) - std::bit_cast<float>(magic));
    const std::uint32_t special = shifted + (224u << 23);
    const std::uint32_t normal = shifted + (112u << 23);
    const std::uint32_t out = exponent == 0 ? subnormal : exponent == 0x0f800000u ? special : normal;
    return std::bit_cast<float>(out | sign);
  }

  /// to_float(from_float(x)) without leaving float, one select chain per
  /// value. This is the per-operation rounding of the binary16 path.
  static float round(float x) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(x);
    const std::uint32_t sign = u & 0x80000000u;
    const std::uint32_t a = u ^ sign;
    const std::uint32_t normal = (a + 0xfffu + ((a >> 13) & 1u)) & ~0x1fffu;
    const std::uint32_t subnormal =
        std::bit_cast<std::uint32_t>((std::bit_cast<float>(a) + 0.5f) - 0.5f);
    std::uint32_t out = a < 0x38800000u ? subnormal : normal;  // below 2^-14
    out = out > 0x477fe000u ? 0x7f800000u : out;               // past 65504
    out = a > 0x7f800000u ? 0x7fc00000u : out;                 // NaN
    return std::bit_cast<float>(out | sign);
  }

 private:
  std::uint16_t bits_ = 0;
};

static_assert(sizeof(Half) == 2);

}  // namespace exemplar
