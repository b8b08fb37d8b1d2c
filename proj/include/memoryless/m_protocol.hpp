#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/nm_protocol.hpp"
#include "memoryless/verify.hpp"

namespace memoryless {

enum class BobOut : std::uint8_t { Zero = 0, One = 1, Continue = 2 };

/// One-way protocol where Alice remembers what she already sent and Bob is memoryless.
struct MOneWayProtocol {
  int t = 0;
  int nA = 0;
  int nB = 0;
  std::vector<std::vector<Message>> schedule;  // per Int(x)
  std::vector<BobOut> bobMap;                  // index (Int(y) << t) | message

  BobOut bob(Input y, Message m) const { return bobMap[(y << t) | m]; }
  void validate() const;
};

struct OneWayOutcome {
  bool decided = false;
  unsigned output = 0;
  int rounds = 0;
};

OneWayOutcome run_m_oneway(const MOneWayProtocol& p, Input x, Input y);
VerifyReport verify_m_oneway(const MOneWayProtocol& p, const SplitFunction& f, int jobs = 0);

/// (i, x_i) for i = 1..n, then the all-ones marker.
MOneWayProtocol build_m_oneway_disj(int n);

/// Alice sends each distinct number once; the last one carries a marker flag.
MOneWayProtocol build_m_oneway_qdisj(int count, int width);
MOneWayProtocol build_m_oneway_qdisj(int n);

/// Single-message protocol naming Alice's row class; its width is the one-way complexity.
MOneWayProtocol build_one_way_protocol(const SplitFunction& f);

/// Alice replays her schedule position named by Bob's incremented counter.
NmProtocol m_oneway_to_nm(const MOneWayProtocol& p);

std::string format_m_oneway(const MOneWayProtocol& p);
MOneWayProtocol parse_m_oneway(std::string_view text);

/// Alice has unbounded memory; Bob answers each t-bit message statelessly.
/// Either side ends the run by sending a halting codeword 1^{t-1}b.
struct MProtocol {
  using AliceStrategy = std::function<Message(Input x, const std::vector<Message>& bobReplies)>;

  int t = 0;
  int nA = 0;
  int nB = 0;
  AliceStrategy alice;
  std::vector<Message> bobMap;  // index (Int(y) << t) | message

  bool is_halting(Message m) const { return m >= pow2(t) - 2; }
};

/// Alice queries each y_i, then sends 1^{t-1}F(x, y).
MProtocol build_generic_m(const SplitFunction& f);

/// Rounds count Alice messages.
OneWayOutcome run_m(const MProtocol& p, Input x, Input y, int roundCap = 1 << 16);
VerifyReport verify_m(const MProtocol& p, const SplitFunction& f, int jobs = 0);

}  // namespace memoryless
