#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/nm_protocol.hpp"
#include "memoryless/verify.hpp"

namespace memoryless {

enum class SAction : std::uint8_t { Send0 = 0, Send1 = 1, Halt0 = 2, Halt1 = 3 };

struct SStep {
  std::uint32_t reg = 0;
  SAction action = SAction::Send0;
};

/// Space-bounded protocol: one bit per round, each player keeps a w-bit register.
/// Registers start at zero and Alice moves first on an incoming 0 bit.
class SProtocol {
 public:
  using Rule = std::function<SStep(Party, Input, std::uint32_t reg, unsigned bit)>;

  static constexpr int kMaxWidth = 24;
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

  SProtocol(int w, int nA, int nB, Rule rule);

  int w() const { return w_; }
  int nA() const { return nA_; }
  int nB() const { return nB_; }
  std::uint64_t registers() const { return pow2(w_); }
  std::uint64_t input_count(Party p) const { return pow2(p == Party::Alice ? nA_ : nB_); }

  SStep step(Party p, Input in, std::uint32_t reg, unsigned bit) const {
    if (dense_) {
      const auto& t = p == Party::Alice ? alice_ : bob_;
      std::uint32_t v = t[(((in << w_) | reg) << 1) | bit];
      return {v >> 2, static_cast<SAction>(v & 3U)};
    }
    return rule_(p, in, reg, bit);
  }

 private:
  int w_;
  int nA_;
  int nB_;
  bool dense_ = false;
  std::vector<std::uint32_t> alice_;
  std::vector<std::uint32_t> bob_;
  Rule rule_;
};

struct SOutcome {
  Outcome outcome = Outcome::Halted;
  unsigned output = 0;
  std::uint64_t rounds = 0;
  // Repeated global state for NonHalting.
  std::uint32_t regA = 0;
  std::uint32_t regB = 0;
  unsigned bit = 0;
  Party turn = Party::Alice;
};

SOutcome run_s(const SProtocol& p, Input x, Input y);
VerifyReport verify_s(const SProtocol& p, const SplitFunction& f, int jobs = 0);

/// Register = s-bit buffer plus a ceil(log s)-bit clock; messages travel one bit per round.
SProtocol nm_to_s(const NmProtocol& p);

/// Message (regA, regB, bit) of width 2w+1.
NmProtocol s_to_nm(const SProtocol& p, int jobs = 0);

std::string format_s(const SProtocol& p);
SProtocol parse_s(std::string_view text);

}  // namespace memoryless
