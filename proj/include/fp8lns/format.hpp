#ifndef FP8LNS_FORMAT_HPP
#define FP8LNS_FORMAT_HPP

#include <cstdint>
#include <stdexcept>

namespace fp8lns {

/// Static descriptor of an 8-bit floating-point format: 1 sign bit,
/// `exponent_bits` of biased exponent, `mantissa_bits` of trailing significand.
struct Fp8Format {
  int exponent_bits;
  int mantissa_bits;

  static constexpr Fp8Format e5m2() { return {5, 2}; }
  static constexpr Fp8Format e4m3() { return {4, 3}; }

  constexpr bool valid() const {
    return exponent_bits >= 2 && mantissa_bits >= 1 &&
           exponent_bits + mantissa_bits == 7;
  }

  constexpr int bias() const { return (1 << (exponent_bits - 1)) - 1; }
  constexpr int precision() const { return mantissa_bits + 1; }
  constexpr int max_exponent_field() const { return (1 << exponent_bits) - 1; }
  constexpr uint8_t mantissa_mask() const {
    return static_cast<uint8_t>((1 << mantissa_bits) - 1);
  }
  /// The bias pattern B = bias << mantissa_bits (0x3C for E5M2, 0x38 for E4M3).
  constexpr uint8_t lns_bias() const {
    return static_cast<uint8_t>(bias() << mantissa_bits);
  }
  /// Smallest / largest 7-bit magnitude encoding a normal number.
  constexpr uint8_t min_normal_magnitude() const {
    return static_cast<uint8_t>(1 << mantissa_bits);
  }
  constexpr uint8_t max_normal_magnitude() const {
    return static_cast<uint8_t>(((max_exponent_field() - 1) << mantissa_bits) |
                                mantissa_mask());
  }

  constexpr bool operator==(const Fp8Format& o) const {
    return exponent_bits == o.exponent_bits && mantissa_bits == o.mantissa_bits;
  }
};

enum class Fp8Class { Zero, Subnormal, Normal, MaxExponent };

/// An 8-bit pattern interpreted under a format. Bit 7 is the sign,
/// bits [6 .. mantissa_bits] the biased exponent, the rest the mantissa.
struct Fp8Bits {
  uint8_t bits;
  Fp8Format format;

  constexpr int sign() const { return (bits >> 7) & 1; }
  constexpr int exponent_field() const {
    return (bits >> format.mantissa_bits) & (format.max_exponent_field());
  }
  constexpr int mantissa_field() const { return bits & format.mantissa_mask(); }
  /// Exponent and mantissa fields together, i.e. the pattern without the sign.
  constexpr uint8_t magnitude() const { return bits & 0x7F; }

  constexpr Fp8Class classify() const {
    const int e = exponent_field();
    if (e == 0) return mantissa_field() == 0 ? Fp8Class::Zero : Fp8Class::Subnormal;
    if (e == format.max_exponent_field()) return Fp8Class::MaxExponent;
    return Fp8Class::Normal;
  }
  constexpr bool is_normal() const { return classify() == Fp8Class::Normal; }

  constexpr bool operator==(const Fp8Bits& o) const {
    return bits == o.bits && format == o.format;
  }
};

struct Decoded {
  int sign;
  int biased_exponent;
  int integral_significand;
  Fp8Class cls;
};

constexpr Decoded decode(Fp8Bits b) {
  return {b.sign(), b.exponent_field(), b.mantissa_field(), b.classify()};
}

/// Inverse of decode. Throws std::out_of_range if a field does not fit.
inline Fp8Bits encode(int sign, int biased_exponent, int integral_significand,
                      Fp8Format format) {
  if (sign < 0 || sign > 1) throw std::out_of_range("fp8: sign field");
  if (biased_exponent < 0 || biased_exponent > format.max_exponent_field())
    throw std::out_of_range("fp8: exponent field");
  if (integral_significand < 0 || integral_significand > format.mantissa_mask())
    throw std::out_of_range("fp8: mantissa field");
  const auto raw = static_cast<uint8_t>(
      (sign << 7) | (biased_exponent << format.mantissa_bits) | integral_significand);
  return Fp8Bits{raw, format};
}

/// Error type for operands outside the supported domain
/// (non-normal inputs, sqrt of a negative, division by zero).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fp8lns

#endif
