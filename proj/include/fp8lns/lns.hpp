#ifndef FP8LNS_LNS_HPP
#define FP8LNS_LNS_HPP

#include <array>
#include <cstdint>

#include "fp8lns/format.hpp"
#include "fp8lns/rounding.hpp"

namespace fp8lns {

/// Sign-magnitude fixed-point reading of a normal pattern: sign bit unchanged,
/// magnitude field X[6:0] - B[6:0] (mod 2^7). For E5M2 this is log2|x| in
/// 2-fraction-bit fixed point, up to the log(1+m) ~ m approximation.
uint8_t to_lns(Fp8Bits b);

struct FromLnsResult {
  Fp8Bits bits;
  RangeStatus flag;
};

/// Inverse of to_lns: adds B back onto the magnitude field. The flag reports
/// magnitudes whose exponent leaves [0, 2^7) before wrapping.
FromLnsResult from_lns(uint8_t pattern, Fp8Format format);

/// Input bits a carry expression may consume. Mantissa bits are read from the
/// operand patterns; ExpParity is bit `mantissa_bits` of the LNS magnitude,
/// i.e. the parity of the unbiased exponent; Sign is the result sign.
enum CarryInput : uint8_t {
  kUsesXMantissa = 1,
  kUsesYMantissa = 2,
  kUsesResultSign = 4,
  kUsesXExpParity = 8,
};

/// A carry-in expression: executable logic over the operands' LNS patterns
/// (bit 7 = operand sign) and the result sign.
struct CarryRule {
  const char* id;
  uint8_t inputs;  // CarryInput mask
  bool (*eval)(uint8_t x_lns, uint8_t y_lns, bool result_sign);
};

/// One (op, format, mode) cell: the magnitude-domain constant and carry rule.
struct ApproxSpec {
  OpKind op;
  Fp8Format format;
  RoundingMode mode;
  bool supported;
  /// 8-bit constant as it appears in the integer expression (two's
  /// complement for the negative ones, e.g. 0xC4 = -0x3C).
  uint8_t constant;
  /// Carry rule; nullptr means the carry is identically 0.
  const CarryRule* carry;
  /// True for cells realized as constant+1 with no conditional carry
  /// (`constant` above already includes the increment).
  bool constant_bumped;

  /// Signed value added to the 7-bit magnitude expression.
  int signed_constant() const { return static_cast<int8_t>(constant); }
};

/// Cell lookup. Unsupported cells are returned with supported == false and
/// carry/constant unset apart from the shared row constant.
ApproxSpec approx_spec(OpKind op, Fp8Format format, RoundingMode mode);

/// The full 6x7 (op x mode) table for one format.
using SupportMatrix = std::array<std::array<ApproxSpec, 7>, 6>;
SupportMatrix support_matrix(Fp8Format format);

/// Undecremented base constant of the op's LNS expression (-B, B, 2B, B/2,
/// 3B/2), as a signed magnitude addend. Derivation sweeps start from here.
int base_constant(OpKind op, Fp8Format format);

/// Evaluates the cell's carry expression. Throws unsupported_cell for cells
/// without one; returns false for cells whose carry is identically 0.
bool carry_in(const ApproxSpec& spec, Fp8Bits x, const Fp8Bits* y, bool result_sign);

class unsupported_cell : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ApplyResult {
  Fp8Bits result;
  RangeStatus flag;  // magnitude wraparound of the 7-bit adder, if any
};

/// Runs the integer-domain approximation for one cell. Operands must be
/// normal; sqrt/rsqrt additionally require x > 0. The 7-bit magnitude wraps;
/// the flag reports the direction when it does.
ApplyResult approx_apply(const ApproxSpec& spec, Fp8Bits x, const Fp8Bits* y = nullptr);

/// Same datapath with an explicit constant and carry bit; used by the
/// analysis sweeps and the CLI's constant-override path.
ApplyResult approx_apply_raw(OpKind op, Fp8Format format, int signed_constant,
                             int carry, Fp8Bits x, const Fp8Bits* y = nullptr);

/// Where the printed form of a carry expression differs from the verified
/// one (see KNOWN-DISCREPANCIES.md), this returns the printed form.
const CarryRule* published_carry_rule(OpKind op, Fp8Format format, RoundingMode mode);

}  // namespace fp8lns

#endif
