#ifndef FP8LNS_EXACT_HPP
#define FP8LNS_EXACT_HPP

#include <gmpxx.h>

#include "fp8lns/format.hpp"

namespace fp8lns {

enum class OpKind { Mul, Square, Div, Recip, Sqrt, Rsqrt };

constexpr bool is_unary(OpKind op) { return op != OpKind::Mul && op != OpKind::Div; }

const char* op_name(OpKind op);

/// Exact real value of an operand or operation result. Either a rational,
/// or the (positive) square root of a rational for sqrt/rsqrt results.
/// All comparisons against rationals are decided in exact integer arithmetic;
/// roots are never evaluated numerically.
class ExactValue {
 public:
  static ExactValue rational(mpq_class v) { return ExactValue(std::move(v), false); }
  static ExactValue sqrt_of(mpq_class radicand);

  bool is_sqrt() const { return sqrt_; }
  /// The rational payload: the value itself, or the radicand for roots.
  const mpq_class& rat() const { return rat_; }

  int sign() const { return sgn(rat_); }  // roots are always positive

  /// Sign of (value - c), decided exactly.
  int compare(const mpq_class& c) const;

  /// |value| as an ExactValue (root values are already positive).
  ExactValue magnitude() const;

  bool operator==(const ExactValue& o) const {
    return sqrt_ == o.sqrt_ && rat_ == o.rat_;
  }

 private:
  ExactValue(mpq_class v, bool is_sqrt) : rat_(std::move(v)), sqrt_(is_sqrt) {}
  mpq_class rat_;
  bool sqrt_;
};

/// Exact value of a normal (or zero) pattern per the format's layout.
/// Subnormal and maximum-exponent patterns are outside the supported domain.
ExactValue exact_value(Fp8Bits b);

/// mpq value of a normal pattern; convenience used by the oracle internals.
mpq_class exact_normal_value(Fp8Bits b);

/// Exact result of an operation on normal operands. `y` is ignored for
/// unary ops. sqrt/rsqrt require x > 0; div/recip require y resp. x nonzero.
ExactValue exact_op(OpKind op, Fp8Bits x, const Fp8Bits* y = nullptr);

}  // namespace fp8lns

#endif
