#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/common.hpp"
#include "memoryless/verify.hpp"

namespace memoryless {

/// Memoryless protocol: per-input total maps over s-bit messages.
/// Codes 1^{s-1}0 and 1^{s-1}1 halt with output 0 and 1 and are fixed points of every map.
class NmProtocol {
 public:
  using Rule = std::function<Message(Party, Input, Message)>;

  static constexpr int kMaxWidth = 30;
  /// Rules whose tables would exceed this many entries stay computed on demand.
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;

  NmProtocol(int s, int nA, int nB, Rule rule);
  static NmProtocol from_tables(int s, int nA, int nB, std::vector<Message> alice, std::vector<Message> bob);

  int s() const { return s_; }
  int nA() const { return nA_; }
  int nB() const { return nB_; }
  std::uint64_t messages() const { return pow2(s_); }
  Message halt_code(unsigned b) const { return static_cast<Message>(pow2(s_) - 2 + (b & 1U)); }
  bool is_halting(Message m) const { return m >= pow2(s_) - 2; }
  unsigned halt_output(Message m) const { return m & 1U; }

  Message reply(Party p, Input in, Message m) const {
    if (is_halting(m)) return m;
    if (dense_) {
      const auto& t = p == Party::Alice ? alice_ : bob_;
      return t[(in << s_) | m];
    }
    return rule_(p, in, m);
  }

  bool dense() const { return dense_; }
  std::uint64_t input_count(Party p) const { return pow2(p == Party::Alice ? nA_ : nB_); }

 private:
  NmProtocol() = default;
  void check_shape() const;

  int s_ = 0;
  int nA_ = 0;
  int nB_ = 0;
  bool dense_ = false;
  std::vector<Message> alice_;
  std::vector<Message> bob_;
  Rule rule_;
};

enum class Outcome : std::uint8_t { Halted, NonHalting, RoundLimitExceeded };

struct SentMessage {
  Party sender = Party::Alice;
  Message msg = 0;
  bool operator==(const SentMessage&) const = default;
};

struct ExecutionTrace {
  int rounds = 0;
  std::vector<SentMessage> messages;  // filled only when recording
  Outcome outcome = Outcome::Halted;
  unsigned output = 0;
  SentMessage witness;  // repeated state for NonHalting
  bool operator==(const ExecutionTrace&) const = default;
};

std::string describe(const ExecutionTrace& t, int s);

ExecutionTrace run_nm(const NmProtocol& p, Input x, Input y, bool record = false);
ExecutionTrace run_nm(const NmProtocol& p, const SplitFunction& f, Input x, Input y, bool record = false);

/// Stops with RoundLimitExceeded when k messages were sent without halting.
ExecutionTrace run_nm_rounds(const NmProtocol& p, Input x, Input y, int k, bool record = false);

VerifyReport verify_protocol(const NmProtocol& p, const SplitFunction& f, int jobs = 0);

/// Checks that `p` and `q` halt with the same output on every pair (both must halt).
VerifyReport compare_protocols(const NmProtocol& p, const NmProtocol& q, int jobs = 0);

NmProtocol build_eq(int n);
NmProtocol build_ip(int n);
NmProtocol build_disj(int n);
NmProtocol build_maj(int n);
NmProtocol build_parity(int n);

/// Alice sends z, Bob answers with the selected y block, Alice outputs the addressed bit of x.
NmProtocol build_isa_nm(const IsaParams& p);

/// Asymptotic target width for each built-in protocol, without the halting reservation.
double target_width(const std::string& name, int n);

std::string format_nm(const NmProtocol& p);
NmProtocol parse_nm(std::string_view text);
NmProtocol load_nm(const std::string& path);
void save_nm(const NmProtocol& p, const std::string& path);

}  // namespace memoryless
