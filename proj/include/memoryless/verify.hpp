#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memoryless/common.hpp"
#include "memoryless/parallel.hpp"

namespace memoryless {

struct Failure {
  Input x = 0;
  Input y = 0;
  std::string detail;
};

/// Result of an exhaustive check over all input pairs. Failures are data, not errors.
struct VerifyReport {
  bool correct = true;
  std::uint64_t pairs = 0;
  int worstRounds = 0;
  std::uint64_t failureCount = 0;
  std::vector<Failure> failures;  // first few, in (x, y) order

  static constexpr std::size_t kKeptFailures = 8;
};

/// Runs check(x, y, rounds, detail) -> ok for every pair, one x-row per task.
template <typename Check>
VerifyReport verify_all_pairs(std::uint64_t rows, std::uint64_t cols, int jobs, Check&& check) {
  std::vector<VerifyReport> perRow(rows);
  parallel_for(rows, jobs, [&](std::uint64_t x) {
    VerifyReport& r = perRow[x];
    for (std::uint64_t y = 0; y < cols; ++y) {
      int rounds = 0;
      std::string detail;
      bool ok = check(x, y, rounds, detail);
      r.worstRounds = std::max(r.worstRounds, rounds);
      if (!ok) {
        ++r.failureCount;
        if (r.failures.size() < VerifyReport::kKeptFailures) r.failures.push_back({x, y, std::move(detail)});
      }
    }
  });
  VerifyReport out;
  out.pairs = rows * cols;
  for (auto& r : perRow) {
    out.worstRounds = std::max(out.worstRounds, r.worstRounds);
    out.failureCount += r.failureCount;
    for (auto& f : r.failures) {
      if (out.failures.size() < VerifyReport::kKeptFailures) out.failures.push_back(std::move(f));
    }
  }
  out.correct = out.failureCount == 0;
  return out;
}

}  // namespace memoryless
