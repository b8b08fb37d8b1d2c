#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "memoryless/common.hpp"

namespace memoryless {

/// Total function {0,1}^nA x {0,1}^nB -> {0,1} stored as a dense truth matrix.
class SplitFunction {
 public:
  SplitFunction(int nA, int nB);
  SplitFunction(int nA, int nB, std::vector<std::uint8_t> table);

  int nA() const { return nA_; }
  int nB() const { return nB_; }
  std::uint64_t rows() const { return pow2(nA_); }
  std::uint64_t cols() const { return pow2(nB_); }

  /// Unchecked lookup.
  unsigned at(Input x, Input y) const { return table_[x * cols() + y]; }
  void set(Input x, Input y, unsigned b) { table_[x * cols() + y] = static_cast<std::uint8_t>(b & 1U); }

  /// Checked lookup; throws Error when an index is out of range.
  unsigned eval(Input x, Input y) const;

  const std::vector<std::uint8_t>& table() const { return table_; }
  bool operator==(const SplitFunction& o) const = default;

 private:
  int nA_;
  int nB_;
  std::vector<std::uint8_t> table_;
};

struct IsaParams {
  int m = 0;     // length of x
  int logm = 0;  // length of each y_j
  int k = 0;     // length of z; Bob holds 2^k blocks

  /// Validates m and derives k = log(m / log m).
  static IsaParams from_m(int m);
  int n() const { return 2 * m + k; }
  int nA() const { return m + k; }
  int nB() const { return logm << k; }
};

/// Builds a zoo function. `n` is bits per side, except ISA (n = m) and QDISJ (n = count per side).
SplitFunction make_named_function(std::string_view name, int n);

SplitFunction make_isa(const IsaParams& p);

/// QDISJ with `count` numbers per side, each a `width`-bit field.
SplitFunction make_qdisj(int count, int width);

/// Default field width for QDISJ: 2*ceil(log n), numbers from [n^2].
int qdisj_field_width(int count);

/// Direct evaluation of the ISA definition (used as a test oracle too).
unsigned isa_value(const IsaParams& p, Input aliceInput, Input bobInput);

SplitFunction load_function(const std::string& path);
void save_function(const SplitFunction& f, const std::string& path);
SplitFunction parse_function(std::string_view text);
std::string format_function(const SplitFunction& f);

}  // namespace memoryless
