#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace memoryless {

/// Inputs are addressed by Int(x): the bit string read most-significant-bit first.
using Input = std::uint64_t;
using Message = std::uint32_t;

enum class Party : std::uint8_t { Alice, Bob };

inline Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }
inline const char* to_string(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }

/// Malformed artifact or violated precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds the desk-scale limits of an exhaustive routine.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Total input bits accepted by any materialized truth table.
inline constexpr int kMaxTotalInputBits = 24;

/// Smallest w with 2^w >= v (0 for v <= 1).
constexpr int ceil_log2(std::uint64_t v) {
  int w = 0;
  while ((std::uint64_t{1} << w) < v) ++w;
  return w;
}

constexpr std::uint64_t pow2(int w) { return std::uint64_t{1} << w; }

/// i-th bit of an n-bit string, 0-indexed from the most significant end.
constexpr unsigned bit_at(Input v, int n, int i) {
  return static_cast<unsigned>((v >> (n - 1 - i)) & 1U);
}

inline unsigned parity(Input v) { return static_cast<unsigned>(__builtin_popcountll(v) & 1); }

/// Renders v as exactly `width` characters over {0,1}.
std::string to_bits(std::uint64_t v, int width);

/// Parses a string over {0,1} of exactly `width` characters.
std::uint64_t parse_bits(std::string_view s, int width);

}  // namespace memoryless
