#include "memoryless/boolfn.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace memoryless {

namespace {

void check_dims(int nA, int nB) {
  if (nA < 1 || nB < 1) throw Error("input widths must be at least 1");
  if (nA + nB > kMaxTotalInputBits) {
    throw ScaleError("nA+nB=" + std::to_string(nA + nB) + " exceeds the limit of " +
                     std::to_string(kMaxTotalInputBits) + " input bits");
  }
}

SplitFunction tabulate(int nA, int nB, const std::function<unsigned(Input, Input)>& fn) {
  SplitFunction f(nA, nB);
  for (Input x = 0; x < f.rows(); ++x) {
    for (Input y = 0; y < f.cols(); ++y) f.set(x, y, fn(x, y));
  }
  return f;
}

std::uint64_t field(Input v, int width, int count, int i) {
  return (v >> ((count - 1 - i) * width)) & (pow2(width) - 1);
}

}  // namespace

SplitFunction::SplitFunction(int nA, int nB) : nA_(nA), nB_(nB) {
  check_dims(nA, nB);
  table_.assign(pow2(nA) * pow2(nB), 0);
}

SplitFunction::SplitFunction(int nA, int nB, std::vector<std::uint8_t> table)
    : nA_(nA), nB_(nB), table_(std::move(table)) {
  check_dims(nA, nB);
  if (table_.size() != pow2(nA) * pow2(nB)) throw Error("truth table size mismatch");
  for (auto b : table_) {
    if (b > 1) throw Error("truth table entries must be 0 or 1");
  }
}

unsigned SplitFunction::eval(Input x, Input y) const {
  if (x >= rows() || y >= cols()) throw Error("input index out of range");
  return at(x, y);
}

IsaParams IsaParams::from_m(int m) {
  if (m < 2 || (m & (m - 1)) != 0) throw Error("ISA requires m to be a power of two >= 2");
  int logm = ceil_log2(static_cast<std::uint64_t>(m));
  if (m % logm != 0) throw Error("ISA requires log m to divide m");
  int q = m / logm;
  if ((q & (q - 1)) != 0) throw Error("ISA requires m / log m to be a power of two");
  IsaParams p;
  p.m = m;
  p.logm = logm;
  p.k = ceil_log2(static_cast<std::uint64_t>(q));
  if (p.k < 1) throw Error("ISA requires k >= 1");
  if (p.nA() + p.nB() > kMaxTotalInputBits) throw ScaleError("ISA instance exceeds the input-bit limit");
  return p;
}

unsigned isa_value(const IsaParams& p, Input aliceInput, Input bobInput) {
  Input x = aliceInput >> p.k;
  Input z = aliceInput & (pow2(p.k) - 1);
  auto blocks = 1 << p.k;
  auto a = static_cast<int>(z);  // 0-based block index, i.e. Int(z)+1 in 1-indexed terms
  auto b = static_cast<int>(field(bobInput, p.logm, blocks, a));
  return bit_at(x, p.m, b);
}

SplitFunction make_isa(const IsaParams& p) {
  return tabulate(p.nA(), p.nB(), [&](Input x, Input y) { return isa_value(p, x, y); });
}

int qdisj_field_width(int count) { return 2 * ceil_log2(static_cast<std::uint64_t>(count)); }

SplitFunction make_qdisj(int count, int width) {
  if (count < 1 || width < 1) throw Error("QDISJ requires count >= 1 and width >= 1");
  int bits = count * width;
  check_dims(bits, bits);
  return tabulate(bits, bits, [&](Input x, Input y) {
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < count; ++j) {
        if (field(x, width, count, i) == field(y, width, count, j)) return 0U;
      }
    }
    return 1U;
  });
}

SplitFunction make_named_function(std::string_view name, int n) {
  if (name == "ISA") return make_isa(IsaParams::from_m(n));
  if (name == "QDISJ") {
    if (n < 2) throw Error("QDISJ requires n >= 2");
    return make_qdisj(n, qdisj_field_width(n));
  }
  if (n < 1) throw Error("n must be at least 1");
  check_dims(n, n);
  if (name == "EQ") return tabulate(n, n, [](Input x, Input y) { return x == y ? 1U : 0U; });
  if (name == "IP") return tabulate(n, n, [](Input x, Input y) { return parity(x & y); });
  if (name == "DISJ") return tabulate(n, n, [](Input x, Input y) { return (x & y) == 0 ? 1U : 0U; });
  if (name == "MAJ") {
    return tabulate(n, n, [n](Input x, Input y) {
      return 2 * __builtin_popcountll(x & y) >= n + 2 ? 1U : 0U;
    });
  }
  if (name == "PARITY") return tabulate(n, n, [](Input x, Input y) { return parity(x) ^ parity(y); });
  if (name == "PDIST_TOTAL") {
    // 1 iff |Int x - Int y| <= sqrt(2^n); the gap and far regions are both 0.
    return tabulate(n, n, [n](Input x, Input y) {
      std::uint64_t d = x > y ? x - y : y - x;
      return d * d <= pow2(n) ? 1U : 0U;
    });
  }
  throw Error("unknown function name '" + std::string(name) + "'");
}

std::string format_function(const SplitFunction& f) {
  std::string out = "na=" + std::to_string(f.nA()) + " nb=" + std::to_string(f.nB()) + "\n";
  out.reserve(out.size() + f.rows() * (f.cols() + 1));
  for (Input x = 0; x < f.rows(); ++x) {
    for (Input y = 0; y < f.cols(); ++y) out.push_back(f.at(x, y) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

SplitFunction parse_function(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int nA = 0;
  int nB = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "na=%d nb=%d%c", &nA, &nB, &tail) != 2) {
    throw Error("malformed header: expected 'na=<int> nb=<int>'");
  }
  check_dims(nA, nB);
  std::vector<std::uint8_t> table;
  table.reserve(pow2(nA) * pow2(nB));
  std::uint64_t rowCount = 0;
  while (std::getline(in, line)) {
    ++rowCount;
    if (rowCount > pow2(nA)) throw Error("row count mismatch");
    for (char c : line) {
      if (c != '0' && c != '1') throw Error("non-binary character at row " + std::to_string(rowCount - 1));
    }
    if (line.size() != pow2(nB)) throw Error("row length mismatch at row " + std::to_string(rowCount - 1));
    for (char c : line) table.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (rowCount != pow2(nA)) throw Error("row count mismatch");
  return SplitFunction(nA, nB, std::move(table));
}

SplitFunction load_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_function(ss.str());
}

void save_function(const SplitFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << format_function(f);
}

}  // namespace memoryless
