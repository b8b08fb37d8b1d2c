#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/m_protocol.hpp"
#include "memoryless/nm_protocol.hpp"
#include "memoryless/verify.hpp"

namespace memoryless {

/// Garden-hose instance. Openings are pipe numbers 1..pipes; the side is implicit.
/// mate[i] is the opening hosed to opening i on the same side, or 0 when i is open.
class GhConfig {
 public:
  GhConfig(int pipes, int nA, int nB, std::vector<int> tap, std::vector<std::vector<int>> aliceMate,
           std::vector<std::vector<int>> bobMate);

  int pipes() const { return pipes_; }
  int nA() const { return nA_; }
  int nB() const { return nB_; }
  int tap(Input x) const { return tap_[x]; }
  int mate(Party side, Input in, int opening) const {
    return (side == Party::Alice ? aliceMate_ : bobMate_)[in][static_cast<std::size_t>(opening)];
  }

 private:
  int pipes_;
  int nA_;
  int nB_;
  std::vector<int> tap_;
  std::vector<std::vector<int>> aliceMate_;
  std::vector<std::vector<int>> bobMate_;
};

struct Opening {
  Party side = Party::Alice;
  int pipe = 0;
  bool operator==(const Opening&) const = default;
};

struct FlowResult {
  std::vector<Opening> path;
  Party spillSide = Party::Alice;
  unsigned output = 0;  // 0 when water spills on Alice's side, 1 on Bob's
};

FlowResult simulate_flow(const GhConfig& c, Input x, Input y);
VerifyReport verify_gh(const GhConfig& c, const SplitFunction& f, int jobs = 0);

/// Checks simulate_flow(c) against run_nm(p) on every pair.
VerifyReport compare_gh_nm(const GhConfig& c, const NmProtocol& p, int jobs = 0);

/// Messages name the pipe whose far end the water just reached; 0 is the start.
NmProtocol gh_to_nm(const GhConfig& c);

/// Reversible forward/reverse pipe construction. Throws when p fails to halt on some pair.
GhConfig nm_to_gh(const NmProtocol& p, int jobs = 0);

GhConfig build_gh_isa(const IsaParams& params);
GhConfig build_gh_qdisj(int n);
GhConfig build_gh_qdisj(int count, int width);

std::string format_gh(const GhConfig& c);
GhConfig parse_gh(std::string_view text);

}  // namespace memoryless
