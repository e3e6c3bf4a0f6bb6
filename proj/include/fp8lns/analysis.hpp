#ifndef FP8LNS_ANALYSIS_HPP
#define FP8LNS_ANALYSIS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fp8lns/lns.hpp"

namespace fp8lns {

/// Signed error in units in the last place of the produced result:
/// (result - z) / ulp(result), with the ulp taken from the result's binade.
/// Represented as a - b*sqrt(r) so root-valued z stays exact; comparisons
/// against rational thresholds are decided by squaring.
class UlpError {
 public:
  static UlpError exactly(mpq_class v) { return UlpError(std::move(v), 0, 0); }
  static UlpError with_root(mpq_class a, mpq_class b, mpq_class r);

  bool is_rational() const { return b_ == 0; }
  const mpq_class& rational() const;  // requires is_rational()

  /// Sign of (error - t), decided exactly.
  int compare(const mpq_class& t) const;
  double to_double() const;

 private:
  UlpError(mpq_class a, mpq_class b, mpq_class r)
      : a_(std::move(a)), b_(std::move(b)), r_(std::move(r)) {}
  mpq_class a_, b_, r_;  // value = a - b*sqrt(r), b >= 0
};

/// Error of `result` against the exact value z, per the signed-ulp definition
/// above. The result must be normal and have the same sign as z.
UlpError ulp_error(Fp8Bits result, const ExactValue& z);

enum class MapFlag { Ok, Overflow, Underflow, UnsupportedInput };

struct ErrorMapEntry {
  uint8_t x_bits;
  uint8_t y_bits;  // 0 and unused for unary ops
  MapFlag flag;
  UlpError err;    // meaningful only when flag == Ok
};

struct ErrorMapOptions {
  bool use_carry = false;                    // requires a mode reference
  std::optional<uint8_t> constant_override;  // 8-bit pattern, else cell constant
  bool full_grid = false;  // sweep every normal pattern instead of collapsing
};

/// Grid of signed ulp errors for one op under one reference. `reference` is
/// a rounding mode, or nullopt for the mathematically exact result. The
/// default grid is collapsed: mantissa x mantissa at a mid-range exponent
/// (mantissa x exponent-parity for sqrt/rsqrt), which loses nothing because
/// the error repeats across binades.
struct ErrorMap {
  OpKind op;
  Fp8Format format;
  std::optional<RoundingMode> reference;
  std::vector<ErrorMapEntry> entries;
};

ErrorMap error_map(OpKind op, Fp8Format format, std::optional<RoundingMode> reference,
                   const ErrorMapOptions& options = {});

/// CSV serialization: header `x_bits,y_bits,ulp_error,flag`, hex patterns,
/// deterministic row order and formatting.
void write_csv(const ErrorMap& map, std::ostream& os);

struct VerifyMismatch {
  uint8_t x_bits;
  uint8_t y_bits;
  uint8_t got;
  uint8_t want;  // for Faithful cells, the RD bracket
};

struct VerifyReport {
  OpKind op;
  Fp8Format format;
  RoundingMode mode;
  bool supported;
  long checked = 0;
  long excluded = 0;
  std::vector<VerifyMismatch> mismatches;
  mpq_class max_abs_ulp = 0;  // vs the mode reference (vs exact for Faithful)
};

/// Exhaustive sweep of one cell against the correctly rounding oracle
/// (bracket membership for Faithful). Unsupported cells come back with
/// supported == false and nothing checked.
VerifyReport verify(OpKind op, Fp8Format format, RoundingMode mode);

nlohmann::json to_json(const VerifyReport& report);

/// Truth table of required carry corrections, derived by exhaustive sweep.
struct CarryTruthTable {
  struct Entry {
    uint8_t x_mantissa;
    uint8_t y_mantissa;
    bool result_sign;
    bool x_exp_parity;
    int carry;      // required correction when feasible
    bool feasible;  // uniform over the sweep and in {0, 1}
  };

  OpKind op;
  Fp8Format format;
  RoundingMode mode;
  int signed_constant;
  uint8_t support;  // minimal CarryInput mask that makes entries uniform
  std::vector<Entry> entries;
  bool feasible;                // every entry feasible
  bool decrement_feasible;      // same sweep at signed_constant - 1
};

/// Reproduces the carry-derivation procedure: buckets every in-range operand
/// combination by its candidate input bits, starting from mantissa bits and
/// growing the support through result sign and exponent parity until the
/// required correction is a function of the chosen bits. An entry whose
/// required correction is not uniformly in {0, 1} is infeasible.
CarryTruthTable derive_carry(OpKind op, Fp8Format format, RoundingMode mode,
                             int signed_constant);

nlohmann::json to_json(const CarryTruthTable& table);

struct PublishedDiff {
  bool has_published = false;
  const char* rule_id = nullptr;
  bool match = false;
  /// Minterms where the published expression disagrees with the derived table.
  std::vector<CarryTruthTable::Entry> mismatches;
};

/// Minterm-level diff of the derived truth table against the cell's published
/// carry expression (the printed form where that differs from the verified
/// one). Cells with a constant carry diff against that constant.
PublishedDiff diff_published(OpKind op, Fp8Format format, RoundingMode mode);

nlohmann::json to_json(const PublishedDiff& diff, OpKind op, Fp8Format format,
                       RoundingMode mode);

/// Parsing helpers shared by the CLI and tests.
std::optional<OpKind> parse_op(const std::string& s);
std::optional<RoundingMode> parse_mode(const std::string& s);
std::optional<Fp8Format> parse_format(const std::string& s);
const char* format_name(Fp8Format f);
const char* flag_name(MapFlag f);

}  // namespace fp8lns

#endif
