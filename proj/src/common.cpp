#include "memoryless/common.hpp"

namespace memoryless {

std::string to_bits(std::uint64_t v, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((v >> (width - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::uint64_t parse_bits(std::string_view s, int width) {
  if (static_cast<int>(s.size()) != width) {
    throw Error("bit string '" + std::string(s) + "' must have length " + std::to_string(width));
  }
  std::uint64_t v = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw Error("non-binary character in '" + std::string(s) + "'");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace memoryless
