#ifndef FP8LNS_ROUNDING_HPP
#define FP8LNS_ROUNDING_HPP

#include "fp8lns/exact.hpp"
#include "fp8lns/format.hpp"

namespace fp8lns {

/// The six IEEE 754-2019 rounding modes plus faithful rounding.
/// Faithful is a predicate over results (RD(z) <= r <= RU(z)), not a
/// quantizer; only the first six are valid inputs to round_reference.
enum class RoundingMode { RNe, RNa, RNz, RU, RD, RZ, Faithful };

const char* mode_name(RoundingMode m);

enum class RangeStatus { InRange, Overflow, Underflow };

struct RoundResult {
  RangeStatus status;
  Fp8Bits bits;  // meaningful only when status == InRange
};

/// Correctly rounded representable normal value of a nonzero exact z under an
/// IEEE mode. Overflow/Underflow is reported when the rounded value would fall
/// outside the normal range of the format. Root values are ordered against
/// candidates and midpoints by comparing squares in integer arithmetic.
RoundResult round_reference(const ExactValue& z, Fp8Format format, RoundingMode mode);

/// True iff result is RD(z) or RU(z). Requires both brackets in normal range.
bool is_faithful(Fp8Bits result, const ExactValue& z, Fp8Format format);

/// True iff z lies within [-max_normal, -min_normal] u [min_normal, max_normal].
/// Operand pairs whose exact result falls outside are excluded from
/// verification sweeps.
bool in_normal_range(const ExactValue& z, Fp8Format format);

namespace detail {
/// Magnitude rounding core: z must be positive; returns the 7-bit magnitude
/// of the rounded value, with ties decided on magnitude-pattern parity for RNe.
/// `mode` must not be RD; callers fold the result sign into RZ/RU first.
RoundResult round_magnitude(const ExactValue& z, Fp8Format format, RoundingMode mode);
}  // namespace detail

}  // namespace fp8lns

#endif
