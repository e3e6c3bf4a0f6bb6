#include "fp8lns/exact.hpp"

namespace fp8lns {

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::Mul: return "mul";
    case OpKind::Square: return "square";
    case OpKind::Div: return "div";
    case OpKind::Recip: return "recip";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::Rsqrt: return "rsqrt";
  }
  return "?";
}

ExactValue ExactValue::sqrt_of(mpq_class radicand) {
  if (sgn(radicand) <= 0) throw domain_error("sqrt of a non-positive value");
  // Collapse exact squares so representable roots compare as plain rationals.
  mpz_class num_root, den_root;
  if (mpz_perfect_square_p(radicand.get_num_mpz_t()) &&
      mpz_perfect_square_p(radicand.get_den_mpz_t())) {
    mpz_sqrt(num_root.get_mpz_t(), radicand.get_num_mpz_t());
    mpz_sqrt(den_root.get_mpz_t(), radicand.get_den_mpz_t());
    return ExactValue(mpq_class(num_root, den_root), false);
  }
  return ExactValue(std::move(radicand), true);
}

int ExactValue::compare(const mpq_class& c) const {
  if (!sqrt_) return cmp(rat_, c);
  if (sgn(c) <= 0) return 1;  // the root is positive
  // sign(sqrt(r) - c) == sign(r - c^2) for c > 0
  return cmp(rat_, c * c);
}

ExactValue ExactValue::magnitude() const {
  if (sqrt_ || sgn(rat_) >= 0) return *this;
  return ExactValue(-rat_, false);
}

mpq_class exact_normal_value(Fp8Bits b) {
  const auto d = decode(b);
  const int p1 = b.format.mantissa_bits;
  mpq_class sig((1 << p1) + d.integral_significand, 1 << p1);
  sig.canonicalize();
  const int e = d.biased_exponent - b.format.bias();
  mpq_class scale;
  if (e >= 0) {
    scale = mpq_class(mpz_class(1) << e, 1);
  } else {
    scale = mpq_class(1, mpz_class(1) << -e);
  }
  mpq_class v = sig * scale;
  return d.sign ? mpq_class(-v) : v;
}

ExactValue exact_value(Fp8Bits b) {
  switch (b.classify()) {
    case Fp8Class::Zero:
      return ExactValue::rational(0);
    case Fp8Class::Normal:
      return ExactValue::rational(exact_normal_value(b));
    default:
      throw domain_error("exact_value: subnormal and max-exponent patterns unsupported");
  }
}

ExactValue exact_op(OpKind op, Fp8Bits x, const Fp8Bits* y) {
  if (!x.is_normal()) throw domain_error("exact_op: x must be normal");
  if (!is_unary(op)) {
    if (y == nullptr) throw domain_error("exact_op: binary op needs y");
    if (!y->is_normal()) throw domain_error("exact_op: y must be normal");
  }
  const mpq_class vx = exact_normal_value(x);
  switch (op) {
    case OpKind::Mul: return ExactValue::rational(vx * exact_normal_value(*y));
    case OpKind::Square: return ExactValue::rational(vx * vx);
    case OpKind::Div: return ExactValue::rational(vx / exact_normal_value(*y));
    case OpKind::Recip: return ExactValue::rational(1 / vx);
    case OpKind::Sqrt:
      if (sgn(vx) < 0) throw domain_error("sqrt of a negative operand");
      return ExactValue::sqrt_of(vx);
    case OpKind::Rsqrt:
      if (sgn(vx) < 0) throw domain_error("rsqrt of a negative operand");
      return ExactValue::sqrt_of(1 / vx);
  }
  throw std::logic_error("exact_op: bad op");
}

}  // namespace fp8lns
