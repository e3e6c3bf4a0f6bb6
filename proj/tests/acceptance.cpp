// Acceptance gate: one pass/fail line per criterion, exit code = failures.
// Criterion 5's published-expression disagreements are machine-logged to
// acceptance_published_diff.json in the working directory.
#include <cstdio>
#include <fstream>
#include <vector>

#include "fp8lns/analysis.hpp"

using namespace fp8lns;

namespace {

const std::vector<Fp8Format> kFormats = {Fp8Format::e5m2(), Fp8Format::e4m3()};
const std::vector<OpKind> kOps = {OpKind::Mul,   OpKind::Square, OpKind::Div,
                                  OpKind::Recip, OpKind::Sqrt,   OpKind::Rsqrt};
const std::vector<RoundingMode> kIeeeModes = {
    RoundingMode::RNe, RoundingMode::RNa, RoundingMode::RNz,
    RoundingMode::RU,  RoundingMode::RD,  RoundingMode::RZ};

int g_failures = 0;

void report(int n, bool pass, const char* what) {
  std::printf("criterion %d: %s - %s\n", n, pass ? "PASS" : "FAIL", what);
  if (!pass) ++g_failures;
}

// 1. Every supported IEEE cell is exactly correctly rounded, exhaustively.
bool criterion1() {
  bool ok = true;
  for (Fp8Format f : kFormats)
    for (OpKind op : kOps)
      for (RoundingMode m : kIeeeModes) {
        if (!approx_spec(op, f, m).supported) continue;
        const VerifyReport r = verify(op, f, m);
        if (!r.mismatches.empty() || r.max_abs_ulp != 0) {
          std::printf("  mismatch: %s %s %s (%zu cases)\n", format_name(f),
                      op_name(op), mode_name(m), r.mismatches.size());
          ok = false;
        }
      }
  return ok;
}

// 2. Every Faithful cell lands on one of the two bracketing neighbors.
bool criterion2() {
  bool ok = true;
  for (Fp8Format f : kFormats)
    for (OpKind op : kOps) {
      const VerifyReport r = verify(op, f, RoundingMode::Faithful);
      if (!r.supported || !r.mismatches.empty()) {
        std::printf("  faithful violation: %s %s (%zu cases)\n", format_name(f),
                    op_name(op), r.mismatches.size());
        ok = false;
      }
    }
  return ok;
}

// 3. Carry derivation at each row's shared constant is feasible exactly for
//    the supported cells; the 15 unattainable cells come back infeasible.
bool criterion3() {
  bool ok = true;
  int dashes = 0;
  for (Fp8Format f : kFormats)
    for (OpKind op : kOps) {
      const int row_k = approx_spec(op, f, RoundingMode::RNe).signed_constant();
      for (RoundingMode m : kIeeeModes) {
        const bool supported = approx_spec(op, f, m).supported;
        if (!supported) ++dashes;
        const CarryTruthTable t = derive_carry(op, f, m, row_k);
        if (t.feasible != supported) {
          std::printf("  feasibility disagrees with the matrix: %s %s %s\n",
                      format_name(f), op_name(op), mode_name(m));
          ok = false;
        }
      }
    }
  if (dashes != 15) {
    std::printf("  expected 15 unattainable cells, matrix has %d\n", dashes);
    ok = false;
  }
  // Note: feasibility is tied to the row's shared constant. With a free
  // choice of neighboring constant, six of the dashed cells admit a
  // {0,1} carry over (mantissa, sign, exponent-parity) inputs; see
  // KNOWN-DISCREPANCIES.md.
  return ok;
}

// 4. Error-range reproduction in exact arithmetic.
bool criterion4() {
  bool ok = true;

  // raw e5m2 product vs exact: one-sided, at most half an ulp (signed
  // convention here: result minus exact, so the range is [-0.5, 0])
  {
    const ErrorMap m = error_map(OpKind::Mul, Fp8Format::e5m2(), std::nullopt);
    bool half_hit = false;
    for (const auto& e : m.entries) {
      if (e.flag != MapFlag::Ok) { ok = false; continue; }
      if (e.err.compare(0) > 0 || e.err.compare(mpq_class(-1, 2)) < 0) {
        std::printf("  e5m2 mul error outside [-0.5, 0]\n");
        ok = false;
      }
      if (e.err.is_rational() && e.err.rational() == mpq_class(-1, 2)) half_hit = true;
    }
    if (!half_hit) { std::printf("  e5m2 mul never reaches half an ulp\n"); ok = false; }
  }

  // e5m2 division at the undecremented constant 0x3C: within [0, 1]
  {
    ErrorMapOptions opt;
    opt.constant_override = 0x3C;
    const ErrorMap m = error_map(OpKind::Div, Fp8Format::e5m2(), std::nullopt, opt);
    for (const auto& e : m.entries)
      if (e.flag == MapFlag::Ok &&
          (e.err.compare(0) < 0 || e.err.compare(1) > 0)) {
        std::printf("  e5m2 div@0x3C error outside [0, 1]\n");
        ok = false;
      }
  }

  // raw e4m3 product vs exact: bottoms out at exactly -1.5 ulp
  {
    const ErrorMap m = error_map(OpKind::Mul, Fp8Format::e4m3(), std::nullopt);
    bool floor_hit = false;
    for (const auto& e : m.entries) {
      if (e.flag != MapFlag::Ok) continue;
      if (e.err.compare(mpq_class(-3, 2)) < 0 || e.err.compare(0) > 0) {
        std::printf("  e4m3 mul error outside [-1.5, 0]\n");
        ok = false;
      }
      if (e.err.is_rational() && e.err.rational() == mpq_class(-3, 2)) floor_hit = true;
    }
    if (!floor_hit) { std::printf("  e4m3 mul never reaches -1.5 ulp\n"); ok = false; }
  }

  // e4m3 sqrt at the row constant vs RU: deficit of up to two magnitude
  // steps (the "-2 ulp" reading; the binade-anchored signed measure reaches
  // -3 because the reference can sit one binade up)
  {
    const Fp8Format f = Fp8Format::e4m3();
    const int k = approx_spec(OpKind::Sqrt, f, RoundingMode::RNe).signed_constant();
    int max_deficit = 0;
    bool in_bounds = true;
    for (int X = f.min_normal_magnitude(); X <= f.max_normal_magnitude(); ++X) {
      const Fp8Bits x{static_cast<uint8_t>(X), f};
      const RoundResult ru =
          round_reference(exact_op(OpKind::Sqrt, x), f, RoundingMode::RU);
      if (ru.status != RangeStatus::InRange) continue;
      const int raw = (X >> 1) + k;
      const int deficit = ru.bits.magnitude() - raw;
      if (deficit < 0) in_bounds = false;
      if (deficit > max_deficit) max_deficit = deficit;
    }
    if (!in_bounds || max_deficit != 2) {
      std::printf("  e4m3 sqrt vs RU: max deficit %d steps (want 2)\n", max_deficit);
      ok = false;
    }
  }
  return ok;
}

// 5. Published-expression cross-check. The implemented rules must agree with
//    the derived truth tables minterm-exactly; printed forms that disagree
//    are logged, and only a cell where neither form verifies is fatal.
bool criterion5() {
  bool ok = true;
  nlohmann::json log = nlohmann::json::array();
  for (Fp8Format f : kFormats)
    for (OpKind op : kOps)
      for (RoundingMode m : kIeeeModes) {
        const ApproxSpec spec = approx_spec(op, f, m);
        if (!spec.supported) continue;

        // implemented rule vs derived table
        const CarryTruthTable t = derive_carry(op, f, m, spec.signed_constant());
        if (!t.feasible) { ok = false; continue; }
        for (const auto& e : t.entries) {
          const uint8_t parity_bit =
              static_cast<uint8_t>(e.x_exp_parity ? (1 << f.mantissa_bits) : 0);
          const uint8_t xl = static_cast<uint8_t>(
              e.x_mantissa | parity_bit |
              ((op == OpKind::Recip && e.result_sign) ? 0x80 : 0));
          const bool c = spec.carry != nullptr &&
                         spec.carry->eval(xl, e.y_mantissa, e.result_sign);
          if ((c ? 1 : 0) != e.carry) {
            std::printf("  implemented rule wrong: %s %s %s\n", format_name(f),
                        op_name(op), mode_name(m));
            ok = false;
            break;
          }
        }

        // printed form vs derived table; disagreements are logged, not fatal
        const PublishedDiff d = diff_published(op, f, m);
        if (d.has_published && !d.match) log.push_back(to_json(d, op, f, m));
      }
  std::ofstream os("acceptance_published_diff.json");
  os << log.dump(2) << "\n";
  std::printf("  %zu cells where the printed form disagrees (logged to "
              "acceptance_published_diff.json)\n", log.size());
  return ok;
}

// 6. Property suite.
bool criterion6() {
  bool ok = true;

  // encode/decode round-trip over every pattern of both formats
  for (Fp8Format f : kFormats)
    for (int p = 0; p < 256; ++p) {
      const Fp8Bits b{static_cast<uint8_t>(p), f};
      const Decoded d = decode(b);
      if (encode(d.sign, d.biased_exponent, d.integral_significand, f).bits != b.bits)
        ok = false;
    }

  // tie discipline and mode ordering over every adjacent-magnitude midpoint
  for (Fp8Format f : kFormats) {
    for (int m1 = f.min_normal_magnitude(); m1 < f.max_normal_magnitude(); ++m1) {
      const int m2 = m1 + 1;
      const mpq_class mid =
          (exact_normal_value(Fp8Bits{static_cast<uint8_t>(m1), f}) +
           exact_normal_value(Fp8Bits{static_cast<uint8_t>(m2), f})) / 2;
      const ExactValue z = ExactValue::rational(mid);
      const uint8_t ne = round_reference(z, f, RoundingMode::RNe).bits.bits;
      const uint8_t na = round_reference(z, f, RoundingMode::RNa).bits.bits;
      const uint8_t nz = round_reference(z, f, RoundingMode::RNz).bits.bits;
      const uint8_t rd = round_reference(z, f, RoundingMode::RD).bits.bits;
      const uint8_t ru = round_reference(z, f, RoundingMode::RU).bits.bits;
      if (na != m2 || nz != m1 || (ne & 1) != 0 || rd != m1 || ru != m2) ok = false;
      if (!(rd <= ne && ne <= ru)) ok = false;
    }
  }

  // lns-approx: sign symmetry of every binary cell, full sweep. Negating one
  // operand negates the result under the sign-symmetric modes; under RU it
  // matches the RD cell's magnitude (and vice versa).
  for (Fp8Format f : kFormats)
    for (OpKind op : {OpKind::Mul, OpKind::Div})
      for (RoundingMode m : kIeeeModes) {
        const ApproxSpec s = approx_spec(op, f, m);
        if (!s.supported) continue;
        const RoundingMode mirror_mode =
            m == RoundingMode::RU ? RoundingMode::RD
            : m == RoundingMode::RD ? RoundingMode::RU : m;
        const ApproxSpec mirror = approx_spec(op, f, mirror_mode);
        for (int X = f.min_normal_magnitude(); X <= f.max_normal_magnitude(); ++X)
          for (int Y = f.min_normal_magnitude(); Y <= f.max_normal_magnitude(); ++Y) {
            const Fp8Bits x{static_cast<uint8_t>(X), f};
            const Fp8Bits y{static_cast<uint8_t>(Y), f};
            const Fp8Bits nx{static_cast<uint8_t>(X | 0x80), f};
            const Fp8Bits ny{static_cast<uint8_t>(Y | 0x80), f};
            const uint8_t pp = approx_apply(s, x, &y).result.bits;
            if (approx_apply(s, nx, &ny).result.bits != pp) ok = false;
            const uint8_t mirrored = approx_apply(mirror, x, &y).result.bits;
            if (approx_apply(s, nx, &y).result.bits != (mirrored ^ 0x80)) ok = false;
          }
      }

  // mantissa locality: the carry depends only on mantissa bits (and sign /
  // exponent parity where declared), so shifting exponents shifts the result
  for (Fp8Format f : kFormats) {
    const ApproxSpec s = approx_spec(OpKind::Mul, f, RoundingMode::RNe);
    const int step = 1 << f.mantissa_bits;
    for (int X = f.min_normal_magnitude(); X + step <= f.max_normal_magnitude(); ++X)
      for (int Y = f.min_normal_magnitude(); Y <= f.max_normal_magnitude(); ++Y) {
        const Fp8Bits x{static_cast<uint8_t>(X), f};
        const Fp8Bits x2{static_cast<uint8_t>(X + step), f};
        const Fp8Bits y{static_cast<uint8_t>(Y), f};
        const ApplyResult r1 = approx_apply(s, x, &y);
        const ApplyResult r2 = approx_apply(s, x2, &y);
        if (r1.flag != RangeStatus::InRange || r2.flag != RangeStatus::InRange)
          continue;
        if (r2.result.magnitude() != r1.result.magnitude() + step) ok = false;
      }
  }
  return ok;
}

}  // namespace

int main() {
  report(1, criterion1(),
         "exhaustive correct rounding on every supported IEEE-mode cell");
  report(2, criterion2(), "faithful cells always land on a bracketing neighbor");
  report(3, criterion3(),
         "carry derivation reproduces the 15 unattainable cells");
  report(4, criterion4(), "error ranges of the raw expressions, exact arithmetic");
  report(5, criterion5(),
         "implemented carry rules match derived truth tables; printed-form "
         "deviations logged");
  report(6, criterion6(), "property suite (round-trip, ties, ordering, symmetry)");
  std::printf("%s\n", g_failures == 0 ? "ALL CRITERIA PASSED"
                                      : "ACCEPTANCE FAILURES PRESENT");
  return g_failures;
}
