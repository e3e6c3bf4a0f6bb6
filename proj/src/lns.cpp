#include "fp8lns/lns.hpp"

namespace fp8lns {

uint8_t to_lns(Fp8Bits b) {
  if (!b.is_normal()) throw domain_error("to_lns: operand must be normal");
  const uint8_t mag = static_cast<uint8_t>((b.magnitude() - b.format.lns_bias()) & 0x7F);
  return static_cast<uint8_t>((b.sign() << 7) | mag);
}

FromLnsResult from_lns(uint8_t pattern, Fp8Format format) {
  // Sign-extend the 7-bit magnitude before adding B back.
  int mag = pattern & 0x7F;
  if (mag >= 64) mag -= 128;
  const int v = mag + format.lns_bias();
  const RangeStatus flag = v < 0    ? RangeStatus::Underflow
                           : v > 127 ? RangeStatus::Overflow
                                     : RangeStatus::InRange;
  const auto bits = static_cast<uint8_t>((pattern & 0x80) | (((v % 128) + 128) % 128));
  return {Fp8Bits{bits, format}, flag};
}

namespace {

constexpr bool b(uint8_t v, int i) { return ((v >> i) & 1) != 0; }
constexpr bool nb(uint8_t v, int i) { return !b(v, i); }

// ---- E5M2 carry expressions -------------------------------------------------

bool mul2_rne(uint8_t x, uint8_t y, bool) {
  return (b(x,0) && b(y,1) && nb(x,1) && nb(y,0)) ||
         (b(x,1) && b(y,0) && nb(x,0) && nb(y,1));
}
bool mul2_rna(uint8_t x, uint8_t y, bool sr) {
  return mul2_rne(x, y, sr) || (b(x,1) && b(y,1) && nb(x,0) && nb(y,0));
}
bool mul2_ru(uint8_t x, uint8_t y, bool sr) {
  return !sr && (b(x,0) || b(x,1)) && (b(y,0) || b(y,1));
}
bool mul2_rd(uint8_t x, uint8_t y, bool sr) {
  return sr && (b(x,0) || b(x,1)) && (b(y,0) || b(y,1));
}
bool sq2_rna(uint8_t x, uint8_t, bool) { return b(x,1) && nb(x,0); }
bool sq2_ru(uint8_t x, uint8_t, bool) { return b(x,0) || b(x,1); }

bool div2_rn(uint8_t x, uint8_t y, bool) {
  return b(x,0) || b(x,1) || (b(y,0) && b(y,1)) || (nb(y,0) && nb(y,1));
}
bool div2_rz(uint8_t x, uint8_t y, bool) {
  return (nb(y,0) && nb(y,1)) || (b(x,0) && nb(x,1) && nb(y,1)) ||
         (b(x,1) && nb(x,0) && nb(y,0)) || (b(x,0) && b(x,1) && b(y,0) && b(y,1));
}
bool div2_ru(uint8_t x, uint8_t y, bool sr) { return !sr || div2_rz(x, y, sr); }
bool div2_rd(uint8_t x, uint8_t y, bool sr) { return sr || div2_rz(x, y, sr); }

bool recip2_rn(uint8_t x, uint8_t, bool) {
  return (b(x,0) && b(x,1)) || (nb(x,0) && nb(x,1));
}
bool recip2_rz(uint8_t x, uint8_t, bool) { return nb(x,0) && nb(x,1); }
bool recip2_ru(uint8_t x, uint8_t, bool) { return nb(x,7) || (nb(x,0) && nb(x,1)); }
bool recip2_rd(uint8_t x, uint8_t, bool) { return b(x,7) || (nb(x,0) && nb(x,1)); }
// Printed forms carry the opposite sign literal; see KNOWN-DISCREPANCIES.md.
bool recip2_ru_printed(uint8_t x, uint8_t, bool) { return b(x,7) || (nb(x,0) && nb(x,1)); }
bool recip2_rd_printed(uint8_t x, uint8_t, bool) { return nb(x,7) || (nb(x,0) && nb(x,1)); }

bool sqrt2_ru(uint8_t x, uint8_t, bool) { return b(x,0); }

// ---- E4M3 carry expressions -------------------------------------------------

bool mul3_rne(uint8_t x, uint8_t y, bool) {
  return (b(x,0) && b(y,2) && nb(x,2) && nb(y,0)) ||
         (b(x,0) && b(y,2) && nb(x,2) && nb(y,1)) ||
         (b(x,1) && b(y,2) && nb(x,2) && nb(y,0)) ||
         (b(x,1) && b(y,2) && nb(x,2) && nb(y,1)) ||
         (b(x,2) && b(y,0) && nb(x,0) && nb(y,2)) ||
         (b(x,2) && b(y,0) && nb(x,1) && nb(y,2)) ||
         (b(x,2) && b(y,1) && nb(x,0) && nb(y,2)) ||
         (b(x,2) && b(y,1) && nb(x,1) && nb(y,2)) ||
         (b(x,2) && b(y,2) && nb(x,1) && nb(y,1)) ||
         (b(x,0) && b(x,1) && b(y,1) && nb(x,2) && nb(y,2)) ||
         (b(x,1) && b(y,0) && b(y,1) && nb(x,2) && nb(y,2));
}
bool mul3_rna(uint8_t x, uint8_t y, bool) {
  return (b(x,0) && b(y,2) && nb(x,1) && nb(y,1)) ||
         (b(x,0) && b(y,2) && nb(x,2) && nb(y,0)) ||
         (b(x,1) && b(y,1) && nb(x,0) && nb(y,2)) ||
         (b(x,1) && b(y,1) && nb(x,2) && nb(y,0)) ||
         (b(x,1) && b(y,1) && nb(x,2) && nb(y,2)) ||
         (b(x,1) && b(y,2) && nb(x,2) && nb(y,1)) ||
         (b(x,2) && b(y,0) && nb(x,0) && nb(y,2)) ||
         (b(x,2) && b(y,0) && nb(x,1) && nb(y,1)) ||
         (b(x,2) && b(y,1) && nb(x,1) && nb(y,2)) ||
         (b(x,2) && b(y,2) && nb(x,0) && nb(x,1) && nb(y,0)) ||
         (b(x,2) && b(y,2) && nb(x,0) && nb(y,0) && nb(y,1));
}
bool mul3_rnz(uint8_t x, uint8_t y, bool) {
  return (b(x,1) && b(y,2) && nb(x,2) && nb(y,0)) ||
         (b(x,1) && b(y,2) && nb(x,2) && nb(y,1)) ||
         (b(x,2) && b(y,1) && nb(x,0) && nb(y,2)) ||
         (b(x,2) && b(y,1) && nb(x,1) && nb(y,2)) ||
         (b(x,2) && b(y,2) && nb(x,1) && nb(y,1)) ||
         (b(x,0) && b(x,1) && b(y,1) && nb(x,2) && nb(y,2)) ||
         (b(x,0) && b(x,2) && b(y,0) && nb(x,1) && nb(y,2)) ||
         (b(x,0) && b(y,0) && b(y,2) && nb(x,2) && nb(y,1)) ||
         (b(x,0) && b(y,1) && b(y,2) && nb(x,2) && nb(y,0)) ||
         (b(x,1) && b(x,2) && b(y,0) && nb(x,0) && nb(y,2)) ||
         (b(x,1) && b(y,0) && b(y,1) && nb(x,2) && nb(y,2));
}
bool mul3_rz(uint8_t x, uint8_t y, bool) {
  return (b(x,1) && b(y,2) && nb(x,0) && nb(x,2) && nb(y,1)) ||
         (b(x,1) && b(y,2) && nb(x,2) && nb(y,0) && nb(y,1)) ||
         (b(x,2) && b(y,1) && nb(x,0) && nb(x,1) && nb(y,2)) ||
         (b(x,2) && b(y,1) && nb(x,1) && nb(y,0) && nb(y,2)) ||
         (b(x,0) && b(x,1) && b(y,0) && b(y,1) && nb(x,2) && nb(y,2)) ||
         (b(x,2) && b(y,2) && nb(x,0) && nb(x,1) && nb(y,0) && nb(y,1));
}
bool mul3_faithful(uint8_t x, uint8_t y, bool) {
  return (b(x,2) || b(x,1) || b(x,0)) && (b(y,2) || b(y,1) || b(y,0));
}

bool sq3_rne_rnz(uint8_t x, uint8_t, bool) {
  return (b(x,2) && nb(x,1)) || (b(x,0) && b(x,1) && nb(x,2));
}
bool sq3_rna(uint8_t x, uint8_t, bool) {
  return (b(x,1) && nb(x,2)) || (b(x,2) && nb(x,1));
}
bool sq3_rd_rz(uint8_t x, uint8_t, bool) {
  return (b(x,0) && b(x,1) && nb(x,2)) || (b(x,2) && nb(x,0) && nb(x,1));
}
bool sq3_faithful(uint8_t x, uint8_t, bool) {
  return (b(x,2) && nb(x,1) && nb(x,0)) || (nb(x,2) && b(x,1) && b(x,0));
}

bool div3_rn(uint8_t x, uint8_t y, bool) {
  return (b(x,0) && b(x,1) && nb(x,2)) || (b(x,1) && nb(x,2) && nb(y,2)) ||
         (b(x,2) && b(y,1) && b(y,2)) || (b(x,2) && nb(x,0) && nb(x,1)) ||
         (b(x,2) && nb(x,1) && nb(y,1)) || (b(y,0) && b(y,1) && b(y,2)) ||
         (nb(y,0) && nb(y,1) && nb(y,2)) ||
         (b(x,0) && nb(x,1) && nb(y,1) && nb(y,2)) ||
         (b(x,2) && b(y,0) && b(y,2) && nb(x,0));
}
bool div3_faithful(uint8_t x, uint8_t y, bool) {
  const bool same_mantissa =
      b(x,2) == b(y,2) && b(x,1) == b(y,1) && b(x,0) == b(y,0);
  return (nb(y,2) && nb(y,1) && nb(y,0)) || same_mantissa;
}

bool recip3_rn(uint8_t x, uint8_t, bool) {
  return (b(x,0) && b(x,1) && b(x,2)) || (nb(x,0) && nb(x,1) && nb(x,2));
}
bool recip3_faithful(uint8_t x, uint8_t, bool) {
  return nb(x,2) && nb(x,1) && nb(x,0);
}

// Bit 3 of the LNS magnitude is the parity of the unbiased exponent; the
// sqrt/rsqrt corrections depend on it because the shift moves the exponent
// LSB into the mantissa.
bool sqrt3_rn(uint8_t x, uint8_t, bool) {
  return nb(x,3) || b(x,0) || b(x,1) || b(x,2);
}
bool sqrt3_rd_rz(uint8_t x, uint8_t, bool) {
  return (b(x,3) && b(x,0)) ||
         (nb(x,3) && ((b(x,0) && nb(x,1)) || (b(x,0) && nb(x,2)) || (nb(x,1) && nb(x,2))));
}
bool rsqrt3_rn(uint8_t x, uint8_t, bool) {
  return (nb(x,3) && nb(x,1) && nb(x,2)) || (b(x,3) && b(x,1) && b(x,2)) || b(x,0);
}
bool rsqrt3_rd_rz(uint8_t x, uint8_t, bool) {
  return (nb(x,3) && nb(x,1) && nb(x,2)) || (b(x,3) && b(x,0) && b(x,1) && b(x,2));
}
// Printed forms use the opposite parity literal; see KNOWN-DISCREPANCIES.md.
bool rsqrt3_rn_printed(uint8_t x, uint8_t, bool) {
  return (b(x,3) && nb(x,1) && nb(x,2)) || (nb(x,3) && b(x,1) && b(x,2)) || b(x,0);
}
bool rsqrt3_rd_rz_printed(uint8_t x, uint8_t, bool) {
  return (b(x,3) && nb(x,1) && nb(x,2)) || (nb(x,3) && b(x,0) && b(x,1) && b(x,2));
}

constexpr uint8_t XM = kUsesXMantissa;
constexpr uint8_t YM = kUsesYMantissa;
constexpr uint8_t SR = kUsesResultSign;
constexpr uint8_t XE = kUsesXExpParity;

const CarryRule kMul2RNe{"e5m2.mul.rne", XM | YM, mul2_rne};
const CarryRule kMul2RNa{"e5m2.mul.rna", XM | YM, mul2_rna};
const CarryRule kMul2RU{"e5m2.mul.ru", XM | YM | SR, mul2_ru};
const CarryRule kMul2RD{"e5m2.mul.rd", XM | YM | SR, mul2_rd};
const CarryRule kSq2RNa{"e5m2.square.rna", XM, sq2_rna};
const CarryRule kSq2RU{"e5m2.square.ru", XM, sq2_ru};
const CarryRule kDiv2RN{"e5m2.div.rn", XM | YM, div2_rn};
const CarryRule kDiv2RZ{"e5m2.div.rz", XM | YM, div2_rz};
const CarryRule kDiv2RU{"e5m2.div.ru", XM | YM | SR, div2_ru};
const CarryRule kDiv2RD{"e5m2.div.rd", XM | YM | SR, div2_rd};
const CarryRule kRecip2RN{"e5m2.recip.rn", XM, recip2_rn};
const CarryRule kRecip2RZ{"e5m2.recip.rz", XM, recip2_rz};
const CarryRule kRecip2RU{"e5m2.recip.ru", XM | SR, recip2_ru};
const CarryRule kRecip2RD{"e5m2.recip.rd", XM | SR, recip2_rd};
const CarryRule kRecip2RUPrinted{"e5m2.recip.ru.printed", XM | SR, recip2_ru_printed};
const CarryRule kRecip2RDPrinted{"e5m2.recip.rd.printed", XM | SR, recip2_rd_printed};
const CarryRule kSqrt2RU{"e5m2.sqrt.ru", XM, sqrt2_ru};

const CarryRule kMul3RNe{"e4m3.mul.rne", XM | YM, mul3_rne};
const CarryRule kMul3RNa{"e4m3.mul.rna", XM | YM, mul3_rna};
const CarryRule kMul3RNz{"e4m3.mul.rnz", XM | YM, mul3_rnz};
const CarryRule kMul3RZ{"e4m3.mul.rz", XM | YM, mul3_rz};
const CarryRule kMul3Faithful{"e4m3.mul.faithful", XM | YM, mul3_faithful};
const CarryRule kSq3RNeRNz{"e4m3.square.rne_rnz", XM, sq3_rne_rnz};
const CarryRule kSq3RNa{"e4m3.square.rna", XM, sq3_rna};
const CarryRule kSq3RDRZ{"e4m3.square.rd_rz", XM, sq3_rd_rz};
const CarryRule kSq3Faithful{"e4m3.square.faithful", XM, sq3_faithful};
const CarryRule kDiv3RN{"e4m3.div.rn", XM | YM, div3_rn};
const CarryRule kDiv3Faithful{"e4m3.div.faithful", XM | YM, div3_faithful};
const CarryRule kRecip3RN{"e4m3.recip.rn", XM, recip3_rn};
const CarryRule kRecip3Faithful{"e4m3.recip.faithful", XM, recip3_faithful};
const CarryRule kSqrt3RN{"e4m3.sqrt.rn", XM | XE, sqrt3_rn};
const CarryRule kSqrt3RDRZ{"e4m3.sqrt.rd_rz", XM | XE, sqrt3_rd_rz};
const CarryRule kRsqrt3RN{"e4m3.rsqrt.rn", XM | XE, rsqrt3_rn};
const CarryRule kRsqrt3RDRZ{"e4m3.rsqrt.rd_rz", XM | XE, rsqrt3_rd_rz};
const CarryRule kRsqrt3RNPrinted{"e4m3.rsqrt.rn.printed", XM | XE, rsqrt3_rn_printed};
const CarryRule kRsqrt3RDRZPrinted{"e4m3.rsqrt.rd_rz.printed", XM | XE, rsqrt3_rd_rz_printed};

struct CellInit {
  bool supported;
  const CarryRule* carry;
  int constant_delta;  // added to the row constant (footnote-b style cells)
};

constexpr CellInit kUnsupported{false, nullptr, 0};
constexpr CellInit zero{true, nullptr, 0};
constexpr CellInit bumped{true, nullptr, 1};
constexpr CellInit rule(const CarryRule& r) { return {true, &r, 0}; }

struct RowInit {
  uint8_t constant;        // shared row constant, 8-bit two's complement
  CellInit modes[7];       // RNe RNa RNz RU RD RZ Faithful
};

// E5M2 rows. The reciprocal row constant is 2B-1 = 0x77.
const RowInit kE5M2Rows[6] = {
    /* mul    */ {0xC4, {rule(kMul2RNe), rule(kMul2RNa), zero, rule(kMul2RU), rule(kMul2RD), zero, zero}},
    /* square */ {0xC4, {zero, rule(kSq2RNa), zero, rule(kSq2RU), zero, zero, zero}},
    /* div    */ {0x3B, {rule(kDiv2RN), rule(kDiv2RN), rule(kDiv2RN), rule(kDiv2RU), rule(kDiv2RD), rule(kDiv2RZ), bumped}},
    /* recip  */ {0x77, {rule(kRecip2RN), rule(kRecip2RN), rule(kRecip2RN), rule(kRecip2RU), rule(kRecip2RD), rule(kRecip2RZ), bumped}},
    /* sqrt   */ {0x1E, {zero, zero, zero, rule(kSqrt2RU), kUnsupported, kUnsupported, zero}},
    /* rsqrt  */ {0x5A, {zero, zero, zero, rule(kSqrt2RU), kUnsupported, kUnsupported, zero}},
};

const RowInit kE4M3Rows[6] = {
    /* mul    */ {0xC8, {rule(kMul3RNe), rule(kMul3RNa), rule(kMul3RNz), kUnsupported, kUnsupported, rule(kMul3RZ), rule(kMul3Faithful)}},
    /* square */ {0xC8, {rule(kSq3RNeRNz), rule(kSq3RNa), rule(kSq3RNeRNz), kUnsupported, rule(kSq3RDRZ), rule(kSq3RDRZ), rule(kSq3Faithful)}},
    /* div    */ {0x37, {rule(kDiv3RN), rule(kDiv3RN), rule(kDiv3RN), kUnsupported, kUnsupported, kUnsupported, rule(kDiv3Faithful)}},
    /* recip  */ {0x6F, {rule(kRecip3RN), rule(kRecip3RN), rule(kRecip3RN), kUnsupported, kUnsupported, kUnsupported, rule(kRecip3Faithful)}},
    /* sqrt   */ {0x1B, {rule(kSqrt3RN), rule(kSqrt3RN), rule(kSqrt3RN), kUnsupported, rule(kSqrt3RDRZ), rule(kSqrt3RDRZ), bumped}},
    /* rsqrt  */ {0x53, {rule(kRsqrt3RN), rule(kRsqrt3RN), rule(kRsqrt3RN), kUnsupported, rule(kRsqrt3RDRZ), rule(kRsqrt3RDRZ), bumped}},
};

ApproxSpec make_spec(OpKind op, Fp8Format format, RoundingMode mode) {
  const RowInit& row =
      (format.exponent_bits == 5 ? kE5M2Rows : kE4M3Rows)[static_cast<int>(op)];
  const CellInit& cell = row.modes[static_cast<int>(mode)];
  ApproxSpec s{};
  s.op = op;
  s.format = format;
  s.mode = mode;
  s.supported = cell.supported;
  s.constant = static_cast<uint8_t>(row.constant + cell.constant_delta);
  s.carry = cell.carry;
  s.constant_bumped = cell.constant_delta != 0;
  return s;
}

int floor_half(int v) { return (v - (v < 0 ? 1 : 0)) / 2; }

}  // namespace

ApproxSpec approx_spec(OpKind op, Fp8Format format, RoundingMode mode) {
  if (!format.valid()) throw std::invalid_argument("approx_spec: bad format");
  return make_spec(op, format, mode);
}

SupportMatrix support_matrix(Fp8Format format) {
  SupportMatrix m;
  for (int op = 0; op < 6; ++op)
    for (int mode = 0; mode < 7; ++mode)
      m[op][mode] = make_spec(static_cast<OpKind>(op), format,
                              static_cast<RoundingMode>(mode));
  return m;
}

int base_constant(OpKind op, Fp8Format format) {
  const int B = format.lns_bias();
  switch (op) {
    case OpKind::Mul:
    case OpKind::Square: return -B;
    case OpKind::Div: return B;
    case OpKind::Recip: return 2 * B;
    case OpKind::Sqrt: return B / 2;
    case OpKind::Rsqrt: return 3 * B / 2;
  }
  throw std::logic_error("base_constant: bad op");
}

bool carry_in(const ApproxSpec& spec, Fp8Bits x, const Fp8Bits* y, bool result_sign) {
  if (!spec.supported)
    throw unsupported_cell("carry_in: cell not in the support matrix");
  if (spec.carry == nullptr) return false;
  const uint8_t xl = to_lns(x);
  const uint8_t yl = (y != nullptr) ? to_lns(*y) : 0;
  return spec.carry->eval(xl, yl, result_sign);
}

ApplyResult approx_apply_raw(OpKind op, Fp8Format format, int signed_constant,
                             int carry, Fp8Bits x, const Fp8Bits* y) {
  if (!x.is_normal()) throw domain_error("approx_apply: x must be normal");
  if (!is_unary(op) && (y == nullptr || !y->is_normal()))
    throw domain_error("approx_apply: y must be normal");
  if ((op == OpKind::Sqrt || op == OpKind::Rsqrt) && x.sign())
    throw domain_error("approx_apply: sqrt/rsqrt need a positive operand");

  const int X = x.magnitude();
  const int Y = (y != nullptr) ? y->magnitude() : 0;
  int v;
  int sign;
  switch (op) {
    case OpKind::Mul: v = X + Y; sign = x.sign() ^ y->sign(); break;
    case OpKind::Square: v = 2 * X; sign = 0; break;
    case OpKind::Div: v = X - Y; sign = x.sign() ^ y->sign(); break;
    case OpKind::Recip: v = -X; sign = x.sign(); break;
    case OpKind::Sqrt: v = X >> 1; sign = 0; break;
    case OpKind::Rsqrt: v = floor_half(-X); sign = 0; break;
    default: throw std::logic_error("approx_apply: bad op");
  }
  v += signed_constant + carry;
  const RangeStatus flag = v < 0    ? RangeStatus::Underflow
                           : v > 127 ? RangeStatus::Overflow
                                     : RangeStatus::InRange;
  const auto mag = static_cast<uint8_t>(((v % 128) + 128) % 128);
  return {Fp8Bits{static_cast<uint8_t>((sign << 7) | mag), format}, flag};
}

ApplyResult approx_apply(const ApproxSpec& spec, Fp8Bits x, const Fp8Bits* y) {
  if (!spec.supported)
    throw unsupported_cell("approx_apply: cell not in the support matrix");
  int sign = 0;
  switch (spec.op) {
    case OpKind::Mul:
    case OpKind::Div:
      if (y == nullptr) throw domain_error("approx_apply: binary op needs y");
      sign = x.sign() ^ y->sign();
      break;
    case OpKind::Recip: sign = x.sign(); break;
    default: break;
  }
  const int c = carry_in(spec, x, y, sign != 0) ? 1 : 0;
  return approx_apply_raw(spec.op, spec.format, spec.signed_constant(), c, x, y);
}

const CarryRule* published_carry_rule(OpKind op, Fp8Format format, RoundingMode mode) {
  if (format.exponent_bits == 5 && op == OpKind::Recip) {
    if (mode == RoundingMode::RU) return &kRecip2RUPrinted;
    if (mode == RoundingMode::RD) return &kRecip2RDPrinted;
  }
  if (format.exponent_bits == 4 && op == OpKind::Rsqrt) {
    if (mode == RoundingMode::RNe || mode == RoundingMode::RNa || mode == RoundingMode::RNz)
      return &kRsqrt3RNPrinted;
    if (mode == RoundingMode::RD || mode == RoundingMode::RZ)
      return &kRsqrt3RDRZPrinted;
  }
  return make_spec(op, format, mode).carry;
}

}  // namespace fp8lns
