#include "fp8lns/rounding.hpp"

#include <vector>

namespace fp8lns {

const char* mode_name(RoundingMode m) {
  switch (m) {
    case RoundingMode::RNe: return "rne";
    case RoundingMode::RNa: return "rna";
    case RoundingMode::RNz: return "rnz";
    case RoundingMode::RU: return "ru";
    case RoundingMode::RD: return "rd";
    case RoundingMode::RZ: return "rz";
    case RoundingMode::Faithful: return "faithful";
  }
  return "?";
}

namespace {

struct MagnitudeTable {
  std::vector<uint8_t> mags;   // normal 7-bit magnitudes, ascending
  std::vector<mpq_class> vals; // their exact values
};

const MagnitudeTable& magnitude_table(Fp8Format f) {
  static MagnitudeTable tables[2];
  MagnitudeTable& t = tables[f.exponent_bits == 5 ? 0 : 1];
  if (t.mags.empty()) {
    for (int m = f.min_normal_magnitude(); m <= f.max_normal_magnitude(); ++m) {
      Fp8Bits b{static_cast<uint8_t>(m), f};
      if (!b.is_normal()) continue;
      t.mags.push_back(static_cast<uint8_t>(m));
      t.vals.push_back(exact_normal_value(b));
    }
  }
  return t;
}

}  // namespace

namespace detail {

RoundResult round_magnitude(const ExactValue& z, Fp8Format format, RoundingMode mode) {
  const MagnitudeTable& t = magnitude_table(format);
  const size_t n = t.mags.size();
  if (z.compare(t.vals.front()) < 0) return {RangeStatus::Underflow, {}};
  if (z.compare(t.vals.back()) > 0) return {RangeStatus::Overflow, {}};

  // Largest representable <= z.
  size_t lo = 0, hi = n - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi + 1) / 2;
    if (z.compare(t.vals[mid]) >= 0)
      lo = mid;
    else
      hi = mid - 1;
  }
  const auto at = [&](size_t i) {
    return RoundResult{RangeStatus::InRange, Fp8Bits{t.mags[i], format}};
  };
  if (z.compare(t.vals[lo]) == 0) return at(lo);

  switch (mode) {
    case RoundingMode::RZ: return at(lo);
    case RoundingMode::RU: return at(lo + 1);
    default: break;
  }
  const mpq_class midpoint = (t.vals[lo] + t.vals[lo + 1]) / 2;
  const int c = z.compare(midpoint);
  if (c > 0) return at(lo + 1);
  if (c < 0) return at(lo);
  switch (mode) {  // exact tie
    case RoundingMode::RNe: return (t.mags[lo] & 1) == 0 ? at(lo) : at(lo + 1);
    case RoundingMode::RNa: return at(lo + 1);
    case RoundingMode::RNz: return at(lo);
    default: throw std::invalid_argument("round_magnitude: bad mode");
  }
}

}  // namespace detail

RoundResult round_reference(const ExactValue& z, Fp8Format format, RoundingMode mode) {
  if (mode == RoundingMode::Faithful)
    throw std::invalid_argument("round_reference: Faithful is a predicate, not a quantizer");
  if (z.sign() == 0) throw std::invalid_argument("round_reference: z must be nonzero");

  const bool negative = z.sign() < 0;
  RoundingMode mag_mode = mode;
  if (mode == RoundingMode::RU) mag_mode = negative ? RoundingMode::RZ : RoundingMode::RU;
  if (mode == RoundingMode::RD) mag_mode = negative ? RoundingMode::RU : RoundingMode::RZ;
  if (mode == RoundingMode::RZ) mag_mode = RoundingMode::RZ;

  RoundResult r = detail::round_magnitude(z.magnitude(), format, mag_mode);
  if (r.status != RangeStatus::InRange) return r;
  if (negative) r.bits.bits |= 0x80;
  r.bits.format = format;
  return r;
}

bool in_normal_range(const ExactValue& z, Fp8Format format) {
  if (z.sign() == 0) return false;
  const MagnitudeTable& t = magnitude_table(format);
  const ExactValue m = z.magnitude();
  return m.compare(t.vals.front()) >= 0 && m.compare(t.vals.back()) <= 0;
}

bool is_faithful(Fp8Bits result, const ExactValue& z, Fp8Format format) {
  const RoundResult down = round_reference(z, format, RoundingMode::RD);
  const RoundResult up = round_reference(z, format, RoundingMode::RU);
  if (down.status != RangeStatus::InRange || up.status != RangeStatus::InRange)
    throw std::invalid_argument("is_faithful: bracket leaves the normal range");
  return result.bits == down.bits.bits || result.bits == up.bits.bits;
}

}  // namespace fp8lns
