#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fp8lns/lns.hpp"

using namespace fp8lns;

namespace {
const Fp8Format E5 = Fp8Format::e5m2();
const Fp8Format E4 = Fp8Format::e4m3();

Fp8Bits b5(uint8_t p) { return Fp8Bits{p, E5}; }
Fp8Bits b4(uint8_t p) { return Fp8Bits{p, E4}; }
}  // namespace

TEST_CASE("to_lns subtracts the bias pattern, sign-magnitude") {
  CHECK(to_lns(b5(0x3C)) == 0x00);  // 1.0
  CHECK(to_lns(b5(0x3D)) == 0x01);
  CHECK(to_lns(b5(0xBD)) == 0x81);  // -1.25: sign bit separate
  CHECK(to_lns(b5(0x04)) == 0x48);  // min normal wraps mod 2^7
  CHECK(to_lns(b4(0x38)) == 0x00);
  CHECK_THROWS_AS(to_lns(b5(0x00)), domain_error);
  CHECK_THROWS_AS(to_lns(b5(0x7C)), domain_error);  // max exponent
}

TEST_CASE("from_lns inverts to_lns on every normal") {
  for (Fp8Format f : {E5, E4}) {
    for (int p = 0; p < 256; ++p) {
      const Fp8Bits b{static_cast<uint8_t>(p), f};
      if (!b.is_normal()) continue;
      const FromLnsResult r = from_lns(to_lns(b), f);
      CHECK(r.bits.bits == b.bits);
      CHECK(r.flag == RangeStatus::InRange);
    }
  }
}

TEST_CASE("support matrix shape and constants") {
  const SupportMatrix m5 = support_matrix(E5);
  const SupportMatrix m4 = support_matrix(E4);
  auto cell = [](const SupportMatrix& m, OpKind op, RoundingMode mode) {
    return m[static_cast<int>(op)][static_cast<int>(mode)];
  };

  CHECK(cell(m5, OpKind::Mul, RoundingMode::RNe).constant == 0xC4);
  CHECK(cell(m5, OpKind::Mul, RoundingMode::RNe).signed_constant() == -0x3C);
  CHECK(cell(m5, OpKind::Div, RoundingMode::RZ).constant == 0x3B);
  CHECK(cell(m5, OpKind::Recip, RoundingMode::RNe).constant == 0x77);
  CHECK(cell(m5, OpKind::Sqrt, RoundingMode::RU).constant == 0x1E);
  CHECK(cell(m5, OpKind::Rsqrt, RoundingMode::RNe).constant == 0x5A);
  CHECK(cell(m4, OpKind::Mul, RoundingMode::RNe).constant == 0xC8);
  CHECK(cell(m4, OpKind::Div, RoundingMode::RNe).constant == 0x37);
  CHECK(cell(m4, OpKind::Recip, RoundingMode::RNz).constant == 0x6F);
  CHECK(cell(m4, OpKind::Sqrt, RoundingMode::RD).constant == 0x1B);
  CHECK(cell(m4, OpKind::Rsqrt, RoundingMode::RZ).constant == 0x53);

  // the unattainable cells
  for (auto [op, mode] : {std::pair{OpKind::Sqrt, RoundingMode::RD},
                          {OpKind::Sqrt, RoundingMode::RZ},
                          {OpKind::Rsqrt, RoundingMode::RD},
                          {OpKind::Rsqrt, RoundingMode::RZ}})
    CHECK_FALSE(cell(m5, op, mode).supported);
  int dashes4 = 0;
  for (const auto& row : m4)
    for (const auto& s : row)
      if (!s.supported) ++dashes4;
  CHECK(dashes4 == 11);

  // constant+1 cells realize Faithful with no conditional carry
  const ApproxSpec fd = cell(m5, OpKind::Div, RoundingMode::Faithful);
  CHECK(fd.constant_bumped);
  CHECK(fd.constant == 0x3C);
  CHECK(fd.carry == nullptr);
  CHECK(cell(m5, OpKind::Recip, RoundingMode::Faithful).constant == 0x78);
  CHECK(cell(m4, OpKind::Sqrt, RoundingMode::Faithful).constant == 0x1C);
  CHECK(cell(m4, OpKind::Rsqrt, RoundingMode::Faithful).constant == 0x54);
}

TEST_CASE("worked multiplications") {
  // 1.25 x 1.5 = 1.875, halfway between 1.75 and 2.0; RNe picks 2.0
  const ApproxSpec rne = approx_spec(OpKind::Mul, E5, RoundingMode::RNe);
  const Fp8Bits x = b5(0x3D), y = b5(0x3E);
  CHECK(carry_in(rne, x, &y, false));
  CHECK(approx_apply(rne, x, &y).result.bits == 0x40);

  // 1.5 x 1.5 = 2.25 -> 0x40 under RNe with zero carry
  const Fp8Bits z = b5(0x3E);
  CHECK_FALSE(carry_in(rne, z, &z, false));
  CHECK(approx_apply(rne, z, &z).result.bits == 0x40);

  // RZ needs no carry: 1.25 x 1.5 truncates to 1.75
  const ApproxSpec rz = approx_spec(OpKind::Mul, E5, RoundingMode::RZ);
  CHECK(approx_apply(rz, x, &y).result.bits == 0x3F);
}

TEST_CASE("unsupported cells refuse to run") {
  const ApproxSpec s = approx_spec(OpKind::Sqrt, E5, RoundingMode::RD);
  CHECK_FALSE(s.supported);
  CHECK_THROWS_AS(approx_apply(s, b5(0x3D)), unsupported_cell);
  CHECK_THROWS_AS(carry_in(s, b5(0x3D), nullptr, false), unsupported_cell);
}

TEST_CASE("operand domain checks") {
  const ApproxSpec mul = approx_spec(OpKind::Mul, E5, RoundingMode::RNe);
  const Fp8Bits zero = b5(0x00), inf = b5(0x7C), ok = b5(0x3C);
  CHECK_THROWS_AS(approx_apply(mul, zero, &ok), domain_error);
  CHECK_THROWS_AS(approx_apply(mul, ok, &inf), domain_error);
  const ApproxSpec sq = approx_spec(OpKind::Sqrt, E5, RoundingMode::RNe);
  CHECK_THROWS_AS(approx_apply(sq, b5(0xBC)), domain_error);  // negative
}

TEST_CASE("sign handling is separate from the magnitude datapath") {
  const ApproxSpec rne = approx_spec(OpKind::Mul, E5, RoundingMode::RNe);
  for (uint8_t xm = 0x10; xm <= 0x70; xm += 7) {
    for (uint8_t ym = 0x10; ym <= 0x70; ym += 9) {
      if (!b5(xm).is_normal() || !b5(ym).is_normal()) continue;
      const Fp8Bits x = b5(xm), y = b5(ym);
      const Fp8Bits nx = b5(static_cast<uint8_t>(xm | 0x80));
      const uint8_t pp = approx_apply(rne, x, &y).result.bits;
      const uint8_t np = approx_apply(rne, nx, &y).result.bits;
      CHECK((np & 0x7F) == (pp & 0x7F));
      CHECK((np >> 7) == ((pp >> 7) ^ 1));
    }
  }
}

TEST_CASE("mantissa locality: scaling an operand shifts the result binade") {
  // doubling x adds one exponent step; the approximate magnitude follows
  const ApproxSpec rne = approx_spec(OpKind::Mul, E4, RoundingMode::RNe);
  const int step = 1 << E4.mantissa_bits;
  for (uint8_t xm = 0x10; xm < 0x60; ++xm) {
    for (uint8_t ym = 0x10; ym < 0x60; ym += 5) {
      if (!b4(xm).is_normal() || !b4(ym).is_normal()) continue;
      const Fp8Bits x = b4(xm), x2 = b4(static_cast<uint8_t>(xm + step)), y = b4(ym);
      if (!x2.is_normal()) continue;
      const ApplyResult r1 = approx_apply(rne, x, &y);
      const ApplyResult r2 = approx_apply(rne, x2, &y);
      if (r1.flag != RangeStatus::InRange || r2.flag != RangeStatus::InRange) continue;
      CHECK(r2.result.magnitude() == r1.result.magnitude() + step);
    }
  }
}

TEST_CASE("square agrees with self-multiplication where both cells exist") {
  for (RoundingMode m : {RoundingMode::RNe, RoundingMode::RNa, RoundingMode::RNz,
                         RoundingMode::RZ}) {
    const ApproxSpec mul = approx_spec(OpKind::Mul, E5, m);
    const ApproxSpec sq = approx_spec(OpKind::Square, E5, m);
    for (int p = E5.min_normal_magnitude(); p <= E5.max_normal_magnitude(); ++p) {
      const Fp8Bits x = b5(static_cast<uint8_t>(p));
      const ApplyResult a = approx_apply(mul, x, &x);
      const ApplyResult b = approx_apply(sq, x);
      if (a.flag != RangeStatus::InRange) continue;
      CHECK(a.result.bits == b.result.bits);
    }
  }
}

TEST_CASE("published forms are exposed where they deviate") {
  // reciprocal directed modes and e4m3 rsqrt have printed forms that differ
  // from the verified ones
  const CarryRule* ru = published_carry_rule(OpKind::Recip, E5, RoundingMode::RU);
  REQUIRE(ru != nullptr);
  CHECK(std::string(ru->id) == "e5m2.recip.ru.printed");
  CHECK(ru != approx_spec(OpKind::Recip, E5, RoundingMode::RU).carry);

  const CarryRule* rn = published_carry_rule(OpKind::Rsqrt, E4, RoundingMode::RNe);
  REQUIRE(rn != nullptr);
  CHECK(std::string(rn->id) == "e4m3.rsqrt.rn.printed");

  // everywhere else the published form is the implemented one
  CHECK(published_carry_rule(OpKind::Mul, E5, RoundingMode::RNe) ==
        approx_spec(OpKind::Mul, E5, RoundingMode::RNe).carry);
  CHECK(published_carry_rule(OpKind::Sqrt, E4, RoundingMode::RNe) ==
        approx_spec(OpKind::Sqrt, E4, RoundingMode::RNe).carry);
}

TEST_CASE("base constants") {
  CHECK(base_constant(OpKind::Mul, E5) == -0x3C);
  CHECK(base_constant(OpKind::Div, E5) == 0x3C);
  CHECK(base_constant(OpKind::Recip, E5) == 0x78);
  CHECK(base_constant(OpKind::Sqrt, E5) == 0x1E);
  CHECK(base_constant(OpKind::Rsqrt, E5) == 0x5A);
  CHECK(base_constant(OpKind::Mul, E4) == -0x38);
  CHECK(base_constant(OpKind::Sqrt, E4) == 0x1C);
  CHECK(base_constant(OpKind::Rsqrt, E4) == 0x54);
}
