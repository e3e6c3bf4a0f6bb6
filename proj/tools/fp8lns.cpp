// Command-line front end: verification sweeps, error-map export, support
// matrix rendering, carry derivation, and a software throughput benchmark.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fp8lns/analysis.hpp"

using namespace fp8lns;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return kExitIo;
  }
  os << payload;
  return os ? kExitOk : kExitIo;
}

struct CellSelector {
  std::string format, op, mode;
  bool all = false;
};

std::vector<RoundingMode> all_modes() {
  return {RoundingMode::RNe, RoundingMode::RNa, RoundingMode::RNz,
          RoundingMode::RU,  RoundingMode::RD,  RoundingMode::RZ,
          RoundingMode::Faithful};
}

std::vector<OpKind> all_ops() {
  return {OpKind::Mul,   OpKind::Square, OpKind::Div,
          OpKind::Recip, OpKind::Sqrt,   OpKind::Rsqrt};
}

int cmd_verify(const CellSelector& sel, const std::string& out_path) {
  const auto fmt = parse_format(sel.format);
  if (!fmt) {
    std::cerr << "error: unknown format '" << sel.format << "'\n";
    return kExitUsage;
  }
  std::vector<std::pair<OpKind, RoundingMode>> cells;
  if (sel.all) {
    for (OpKind op : all_ops())
      for (RoundingMode m : all_modes())
        if (approx_spec(op, *fmt, m).supported) cells.emplace_back(op, m);
  } else {
    const auto op = parse_op(sel.op);
    const auto mode = parse_mode(sel.mode);
    if (!op || !mode) {
      std::cerr << "error: verify needs --all or both --op and --mode\n";
      return kExitUsage;
    }
    if (!approx_spec(*op, *fmt, *mode).supported) {
      std::cerr << "error: " << sel.format << " " << sel.op << " under " << sel.mode
                << " is unsupported per the support matrix\n";
      return kExitUsage;
    }
    cells.emplace_back(*op, *mode);
  }

  nlohmann::json reports = nlohmann::json::array();
  bool mismatched = false;
  for (const auto& [op, mode] : cells) {
    VerifyReport r = verify(op, *fmt, mode);
    if (!r.mismatches.empty()) mismatched = true;
    reports.push_back(to_json(r));
  }
  const int rc = write_output(out_path, reports.dump(2) + "\n");
  if (rc != kExitOk) return rc;
  return mismatched ? kExitMismatch : kExitOk;
}

int cmd_error_map(const std::string& fmt_s, const std::string& op_s,
                  const std::string& ref_s, bool carry, const std::string& constant_s,
                  bool full, const std::string& out_path) {
  const auto fmt = parse_format(fmt_s);
  const auto op = parse_op(op_s);
  if (!fmt || !op) {
    std::cerr << "error: bad --format/--op\n";
    return kExitUsage;
  }
  std::optional<RoundingMode> ref;
  if (ref_s != "exact") {
    ref = parse_mode(ref_s);
    if (!ref) {
      std::cerr << "error: --ref must be 'exact' or a rounding mode\n";
      return kExitUsage;
    }
  }
  ErrorMapOptions opt;
  opt.use_carry = carry;
  opt.full_grid = full;
  if (!constant_s.empty()) {
    try {
      opt.constant_override = static_cast<uint8_t>(std::stoul(constant_s, nullptr, 0));
    } catch (const std::exception&) {
      std::cerr << "error: bad --constant '" << constant_s << "'\n";
      return kExitUsage;
    }
  }
  try {
    const ErrorMap map = error_map(*op, *fmt, ref, opt);
    std::ostringstream os;
    write_csv(map, os);
    return write_output(out_path, os.str());
  } catch (const unsupported_cell& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

const char* op_label(OpKind op) {
  switch (op) {
    case OpKind::Mul: return "x*y  ";
    case OpKind::Square: return "x^2  ";
    case OpKind::Div: return "x/y  ";
    case OpKind::Recip: return "1/x  ";
    case OpKind::Sqrt: return "sqrt ";
    case OpKind::Rsqrt: return "rsqrt";
  }
  return "?";
}

int cmd_table(const std::string& fmt_s) {
  const auto fmt = parse_format(fmt_s);
  if (!fmt) {
    std::cerr << "error: unknown format '" << fmt_s << "'\n";
    return kExitUsage;
  }
  const SupportMatrix m = support_matrix(*fmt);
  std::printf("%s support matrix (carry rule per rounding mode; '-' = unattainable)\n",
              format_name(*fmt));
  std::printf("%-6s %-5s", "op", "const");
  for (RoundingMode mode : all_modes()) std::printf(" | %-14s", mode_name(mode));
  std::printf("\n");
  for (OpKind op : all_ops()) {
    const auto& row = m[static_cast<int>(op)];
    std::printf("%-6s 0x%02X ", op_label(op), row[0].constant);
    for (const ApproxSpec& s : row) {
      std::string cell;
      if (!s.supported) cell = "-";
      else if (s.constant_bumped) cell = "0 (const+1)";
      else if (s.carry == nullptr) cell = "0";
      else {
        cell = s.carry->id;
        // drop the redundant format prefix
        const auto dot = cell.find('.');
        if (dot != std::string::npos) cell = cell.substr(dot + 1);
      }
      std::printf(" | %-14s", cell.c_str());
    }
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_derive(const std::string& fmt_s, const std::string& op_s,
               const std::string& mode_s, const std::string& constant_s,
               const std::string& out_path) {
  const auto fmt = parse_format(fmt_s);
  const auto op = parse_op(op_s);
  const auto mode = parse_mode(mode_s);
  if (!fmt || !op || !mode || *mode == RoundingMode::Faithful) {
    std::cerr << "error: derive needs --format, --op and an IEEE --mode\n";
    return kExitUsage;
  }
  int k;
  if (!constant_s.empty()) {
    try {
      k = static_cast<int8_t>(std::stoul(constant_s, nullptr, 0));
    } catch (const std::exception&) {
      std::cerr << "error: bad --constant '" << constant_s << "'\n";
      return kExitUsage;
    }
  } else {
    k = approx_spec(*op, *fmt, *mode).signed_constant();
  }
  nlohmann::json j = to_json(derive_carry(*op, *fmt, *mode, k));
  j["published"] = to_json(diff_published(*op, *fmt, *mode), *op, *fmt, *mode);
  return write_output(out_path, j.dump(2) + "\n");
}

int cmd_bench(const std::string& fmt_s, const std::string& op_s,
              const std::string& mode_s, long count) {
  const auto fmt = parse_format(fmt_s);
  const auto op = parse_op(op_s);
  const auto mode = parse_mode(mode_s);
  if (!fmt || !op || !mode) {
    std::cerr << "error: bad --format/--op/--mode\n";
    return kExitUsage;
  }
  const ApproxSpec spec = approx_spec(*op, *fmt, *mode);
  if (!spec.supported) {
    std::cerr << "error: unsupported cell\n";
    return kExitUsage;
  }
  const bool binary = !is_unary(*op);
  std::vector<uint8_t> pos;
  for (int p = 0; p < 128; ++p)
    if (Fp8Bits{static_cast<uint8_t>(p), *fmt}.is_normal())
      pos.push_back(static_cast<uint8_t>(p));

  std::mt19937 rng(0xF8F8F8F8u);  // fixed seed: deterministic checksums
  std::uniform_int_distribution<size_t> pick(0, pos.size() - 1);
  std::vector<Fp8Bits> xs, ys;
  xs.reserve(count);
  ys.reserve(count);
  for (long i = 0; i < count; ++i) {
    xs.push_back(Fp8Bits{pos[pick(rng)], *fmt});
    ys.push_back(Fp8Bits{pos[pick(rng)], *fmt});
  }

  using clock = std::chrono::steady_clock;
  uint32_t sum_approx = 0;
  auto t0 = clock::now();
  for (long i = 0; i < count; ++i)
    sum_approx += approx_apply(spec, xs[i], binary ? &ys[i] : nullptr).result.bits;
  auto t1 = clock::now();
  uint32_t sum_oracle = 0;
  long oracle_in_range = 0;
  for (long i = 0; i < count; ++i) {
    const ExactValue z = exact_op(*op, xs[i], binary ? &ys[i] : nullptr);
    const RoundingMode m =
        *mode == RoundingMode::Faithful ? RoundingMode::RNe : *mode;
    const RoundResult r = round_reference(z, *fmt, m);
    if (r.status == RangeStatus::InRange) {
      sum_oracle += r.bits.bits;
      ++oracle_in_range;
    }
  }
  auto t2 = clock::now();

  const double s_approx = std::chrono::duration<double>(t1 - t0).count();
  const double s_oracle = std::chrono::duration<double>(t2 - t1).count();
  std::printf("cell: %s %s %s, %ld samples\n", format_name(*fmt), op_name(*op),
              mode_name(*mode), count);
  std::printf("approx path: %.3f Mops/s (checksum 0x%08X)\n",
              count / s_approx / 1e6, sum_approx);
  std::printf("oracle path: %.3f Mops/s (checksum 0x%08X, %ld in range)\n",
              count / s_oracle / 1e6, sum_oracle, oracle_in_range);
  std::printf("speedup: %.1fx\n", s_oracle / s_approx);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate FP8 (E5M2/E4M3) arithmetic in the log domain: "
               "exhaustive verification, error maps, carry derivation"};
  app.require_subcommand(1);

  CellSelector vsel;
  std::string v_out;
  auto* verify_cmd = app.add_subcommand("verify", "sweep cells against the exact oracle");
  verify_cmd->add_option("--format", vsel.format, "e5m2 or e4m3")->required();
  verify_cmd->add_option("--op", vsel.op, "mul|square|div|recip|sqrt|rsqrt");
  verify_cmd->add_option("--mode", vsel.mode, "rne|rna|rnz|ru|rd|rz|faithful");
  verify_cmd->add_flag("--all", vsel.all, "all supported cells of the format");
  verify_cmd->add_option("-o,--output", v_out, "write the JSON report here");

  std::string m_fmt, m_op, m_ref = "exact", m_const, m_out;
  bool m_carry = false, m_full = false;
  auto* map_cmd = app.add_subcommand("error-map", "CSV grid of signed ulp errors");
  map_cmd->add_option("--format", m_fmt)->required();
  map_cmd->add_option("--op", m_op)->required();
  map_cmd->add_option("--ref", m_ref, "'exact' or a rounding mode (default exact)");
  map_cmd->add_flag("--carry,!--no-carry", m_carry, "apply the cell's carry rule");
  map_cmd->add_option("--constant", m_const, "override the magnitude constant (e.g. 0x3C)");
  map_cmd->add_flag("--full", m_full, "full 8-bit grid instead of the collapsed one");
  map_cmd->add_option("-o,--output", m_out, "write the CSV here");

  std::string t_fmt;
  auto* table_cmd = app.add_subcommand("table", "print the support matrix");
  table_cmd->add_option("--format", t_fmt)->required();

  std::string d_fmt, d_op, d_mode, d_const, d_out;
  auto* derive_cmd = app.add_subcommand("derive", "derive the carry truth table for a cell");
  derive_cmd->add_option("--format", d_fmt)->required();
  derive_cmd->add_option("--op", d_op)->required();
  derive_cmd->add_option("--mode", d_mode)->required();
  derive_cmd->add_option("--constant", d_const, "signed constant to derive at (default: cell's)");
  derive_cmd->add_option("-o,--output", d_out, "write the JSON here");

  std::string b_fmt, b_op, b_mode = "rne";
  long b_count = 1 << 16;
  auto* bench_cmd = app.add_subcommand("bench", "throughput of approx vs oracle path");
  bench_cmd->add_option("--format", b_fmt)->required();
  bench_cmd->add_option("--op", b_op)->required();
  bench_cmd->add_option("--mode", b_mode);
  bench_cmd->add_option("--count", b_count, "number of operand samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify_cmd->parsed()) return cmd_verify(vsel, v_out);
    if (map_cmd->parsed())
      return cmd_error_map(m_fmt, m_op, m_ref, m_carry, m_const, m_full, m_out);
    if (table_cmd->parsed()) return cmd_table(t_fmt);
    if (derive_cmd->parsed()) return cmd_derive(d_fmt, d_op, d_mode, d_const, d_out);
    if (bench_cmd->parsed()) return cmd_bench(b_fmt, b_op, b_mode, b_count);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
