#include "memoryless/s_protocol.hpp"

#include <array>
#include <memory>
#include <sstream>

namespace memoryless {

namespace {

struct GlobalState {
  std::uint32_t regA = 0;
  std::uint32_t regB = 0;
  unsigned bit = 0;
  Party turn = Party::Alice;
  bool operator==(const GlobalState&) const = default;
};

// Advances one round. Returns false when the active player halts.
bool advance(const SProtocol& p, Input x, Input y, GlobalState& g, unsigned& output) {
  bool alice = g.turn == Party::Alice;
  SStep st = p.step(g.turn, alice ? x : y, alice ? g.regA : g.regB, g.bit);
  if (st.action == SAction::Halt0 || st.action == SAction::Halt1) {
    output = st.action == SAction::Halt1 ? 1 : 0;
    return false;
  }
  (alice ? g.regA : g.regB) = st.reg;
  g.bit = static_cast<unsigned>(st.action);
  g.turn = other(g.turn);
  return true;
}

const char* action_token(SAction a) {
  switch (a) {
    case SAction::Send0: return "s0";
    case SAction::Send1: return "s1";
    case SAction::Halt0: return "h0";
    case SAction::Halt1: return "h1";
  }
  return "s0";
}

}  // namespace

SProtocol::SProtocol(int w, int nA, int nB, Rule rule) : w_(w), nA_(nA), nB_(nB), rule_(std::move(rule)) {
  if (w < 1 || w > kMaxWidth) throw ScaleError("register width out of range");
  if (nA < 1 || nB < 1 || nA > kMaxTotalInputBits || nB > kMaxTotalInputBits) throw Error("input widths out of range");
  std::uint64_t entries = (pow2(nA) + pow2(nB)) << (w + 1);
  if (entries > kDenseLimit) return;
  alice_.resize(pow2(nA) << (w + 1));
  bob_.resize(pow2(nB) << (w + 1));
  for (Party side : {Party::Alice, Party::Bob}) {
    auto& t = side == Party::Alice ? alice_ : bob_;
    for (Input in = 0; in < input_count(side); ++in) {
      for (std::uint32_t reg = 0; reg < registers(); ++reg) {
        for (unsigned bit = 0; bit < 2; ++bit) {
          SStep st = rule_(side, in, reg, bit);
          if (st.reg >= registers()) throw Error("transition produced a register wider than w");
          t[(((in << w) | reg) << 1) | bit] = (st.reg << 2) | static_cast<std::uint32_t>(st.action);
        }
      }
    }
  }
  dense_ = true;
  rule_ = nullptr;
}

// Brent cycle detection over global states, so no visited set is needed.
SOutcome run_s(const SProtocol& p, Input x, Input y) {
  SOutcome out;
  GlobalState tortoise;
  GlobalState hare = tortoise;
  unsigned output = 0;
  std::uint64_t power = 1;
  std::uint64_t lambda = 0;
  for (;;) {
    if (!advance(p, x, y, hare, output)) {
      ++out.rounds;
      out.outcome = Outcome::Halted;
      out.output = output;
      return out;
    }
    ++out.rounds;
    ++lambda;
    if (hare == tortoise) {
      out.outcome = Outcome::NonHalting;
      out.regA = hare.regA;
      out.regB = hare.regB;
      out.bit = hare.bit;
      out.turn = hare.turn;
      return out;
    }
    if (lambda == power) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
  }
}

VerifyReport verify_s(const SProtocol& p, const SplitFunction& f, int jobs) {
  if (p.nA() != f.nA() || p.nB() != f.nB()) throw Error("protocol and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    SOutcome o = run_s(p, x, y);
    rounds = static_cast<int>(std::min<std::uint64_t>(o.rounds, INT32_MAX));
    if (o.outcome == Outcome::Halted && o.output == f.at(x, y)) return true;
    if (o.outcome == Outcome::Halted) {
      detail = "output=" + std::to_string(o.output);
    } else {
      detail = "nonhalting state regA=" + to_bits(o.regA, p.w()) + " regB=" + to_bits(o.regB, p.w()) +
               " bit=" + std::to_string(o.bit) + " turn=" + to_string(o.turn);
    }
    return false;
  });
}

// Receive mode (buffer top bit 0): low s-1 bits collect incoming bits, clock counts them.
// Alice stores the count plus one mod s, so her all-zero register reads as "s-1 zeros received".
// Send mode (buffer top bit 1): low bits hold what is left to send, clock counts bits already sent.
SProtocol nm_to_s(const NmProtocol& p) {
  const int s = p.s();
  const int c = ceil_log2(static_cast<std::uint64_t>(s));
  const int w = s + c;
  const std::uint32_t lowMask = static_cast<std::uint32_t>(pow2(s - 1) - 1);
  const std::uint32_t flag = static_cast<std::uint32_t>(pow2(s - 1));
  auto nm = std::make_shared<NmProtocol>(p);
  return SProtocol(w, p.nA(), p.nB(), [=](Party side, Input in, std::uint32_t reg, unsigned bit) -> SStep {
    const bool alice = side == Party::Alice;
    const std::uint32_t buf = reg & static_cast<std::uint32_t>(pow2(s) - 1);
    const std::uint32_t clock = reg >> s;
    const std::uint32_t low = buf & lowMask;
    auto clockFor = [&](std::uint32_t received) { return alice ? (received + 1) % static_cast<std::uint32_t>(s) : received; };
    if ((buf & flag) == 0) {
      if (clock >= static_cast<std::uint32_t>(s)) return {0, SAction::Send0};
      std::uint32_t received = alice ? (clock + s - 1) % s : clock;
      if (received < static_cast<std::uint32_t>(s - 1)) {
        std::uint32_t nextLow = ((low << 1) | bit) & lowMask;
        return {(clockFor(received + 1) << s) | nextLow, SAction::Send0};
      }
      Message incoming = static_cast<Message>((low << 1) | bit);
      Message reply = nm->reply(side, in, incoming);
      if (nm->is_halting(reply)) return {0, nm->halt_output(reply) ? SAction::Halt1 : SAction::Halt0};
      unsigned top = (reply >> (s - 1)) & 1U;
      return {(1U << s) | flag | (reply & lowMask), static_cast<SAction>(top)};
    }
    if (clock < 1 || clock > static_cast<std::uint32_t>(s - 1)) return {0, SAction::Send0};
    const int shift = s - 1 - static_cast<int>(clock);
    unsigned out = (low >> shift) & 1U;
    std::uint32_t rest = low & ~(1U << shift);
    if (clock + 1 == static_cast<std::uint32_t>(s)) return {clockFor(0) << s, static_cast<SAction>(out)};
    return {((clock + 1) << s) | flag | rest, static_cast<SAction>(out)};
  });
}

NmProtocol s_to_nm(const SProtocol& p, int jobs) {
  const int w = p.w();
  const std::uint32_t ones = static_cast<std::uint32_t>(pow2(w) - 1);
  // Registers each side ever holds in a sent message, over all input pairs.
  std::vector<std::vector<std::uint8_t>> usedA(pow2(p.nA()), std::vector<std::uint8_t>(pow2(w), 0));
  std::vector<std::vector<std::uint8_t>> usedB(pow2(p.nA()), std::vector<std::uint8_t>(pow2(w), 0));
  parallel_for(pow2(p.nA()), jobs, [&](std::uint64_t x) {
    auto& ua = usedA[x];
    auto& ub = usedB[x];
    for (Input y = 0; y < pow2(p.nB()); ++y) {
      GlobalState g;
      unsigned output = 0;
      ua[0] = ub[0] = 1;
      SOutcome o = run_s(p, x, y);
      for (std::uint64_t r = 0; r < o.rounds && advance(p, x, y, g, output); ++r) {
        ua[g.regA] = 1;
        ub[g.regB] = 1;
      }
    }
  });
  std::vector<std::uint8_t> reachA(pow2(w), 0);
  std::vector<std::uint8_t> reachB(pow2(w), 0);
  for (std::uint64_t x = 0; x < usedA.size(); ++x) {
    for (std::uint64_t r = 0; r < pow2(w); ++r) {
      reachA[r] |= usedA[x][r];
      reachB[r] |= usedB[x][r];
    }
  }
  // Keep the all-ones register out of every data message by swapping it with an unused value on one side.
  auto pick = [&](const std::vector<std::uint8_t>& reach) -> std::int64_t {
    if (!reach[ones]) return static_cast<std::int64_t>(ones);
    for (std::uint32_t r = 1; r < ones; ++r) {
      if (!reach[r]) return r;
    }
    return -1;
  };
  std::int64_t uA = pick(reachA);
  std::int64_t uB = uA < 0 ? pick(reachB) : static_cast<std::int64_t>(ones);
  auto swapper = [ones](std::int64_t u) {
    auto v = static_cast<std::uint32_t>(u);
    return [ones, v](std::uint32_t r) { return r == v ? ones : r == ones ? v : r; };
  };
  auto sp = std::make_shared<SProtocol>(p);
  if (uA < 0 && uB < 0) {
    // Every register is live on both sides: prefix data messages with a 0 tag instead.
    const int s = 2 * w + 2;
    auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
    return NmProtocol(s, p.nA(), p.nB(), [=](Party side, Input in, Message m) -> Message {
      std::uint32_t a = (m >> (w + 1)) & ones;
      std::uint32_t b = (m >> 1) & ones;
      SStep st = sp->step(side, in, side == Party::Alice ? a : b, m & 1U);
      if (st.action == SAction::Halt0 || st.action == SAction::Halt1) return halt(st.action == SAction::Halt1);
      if (side == Party::Alice) a = st.reg; else b = st.reg;
      return (a << (w + 1)) | (b << 1) | static_cast<Message>(st.action);
    });
  }
  auto piA = swapper(uA < 0 ? ones : uA);
  auto piB = swapper(uA < 0 ? uB : ones);
  const int s = 2 * w + 1;
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, p.nA(), p.nB(), [=](Party side, Input in, Message m) -> Message {
    std::uint32_t a = m >> (w + 1);
    std::uint32_t b = (m >> 1) & ones;
    bool alice = side == Party::Alice;
    SStep st = sp->step(side, in, alice ? piA(a) : piB(b), m & 1U);
    if (st.action == SAction::Halt0 || st.action == SAction::Halt1) return halt(st.action == SAction::Halt1);
    if (alice) a = piA(st.reg); else b = piB(st.reg);
    return (a << (w + 1)) | (b << 1) | static_cast<Message>(st.action);
  });
}

std::string format_s(const SProtocol& p) {
  std::uint64_t entries = (p.input_count(Party::Alice) + p.input_count(Party::Bob)) << (p.w() + 1);
  if (entries > SProtocol::kDenseLimit) throw ScaleError("protocol too large to serialize");
  std::string out = "w=" + std::to_string(p.w()) + " na=" + std::to_string(p.nA()) + " nb=" + std::to_string(p.nB()) + "\n";
  for (Party side : {Party::Alice, Party::Bob}) {
    int n = side == Party::Alice ? p.nA() : p.nB();
    for (Input in = 0; in < p.input_count(side); ++in) {
      out += side == Party::Alice ? "A " : "B ";
      out += to_bits(in, n);
      for (std::uint32_t reg = 0; reg < p.registers(); ++reg) {
        for (unsigned bit = 0; bit < 2; ++bit) {
          SStep st = p.step(side, in, reg, bit);
          out += " " + to_bits(st.reg, p.w()) + ":" + action_token(st.action);
        }
      }
      out.push_back('\n');
    }
  }
  return out;
}

SProtocol parse_s(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int w = 0;
  int nA = 0;
  int nB = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "w=%d na=%d nb=%d%c", &w, &nA, &nB, &tail) != 3) {
    throw Error("malformed header: expected 'w=<int> na=<int> nb=<int>'");
  }
  if (w < 1 || w > 16 || nA < 1 || nB < 1 || nA > kMaxTotalInputBits || nB > kMaxTotalInputBits) {
    throw Error("header values out of range");
  }
  auto tables = std::make_shared<std::array<std::vector<std::uint32_t>, 2>>();
  (*tables)[0].reserve(pow2(nA) << (w + 1));
  (*tables)[1].reserve(pow2(nB) << (w + 1));
  std::uint64_t seen[2] = {0, 0};
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    std::string bits;
    ls >> tag >> bits;
    int side = tag == "A" ? 0 : tag == "B" ? 1 : -1;
    if (side < 0) throw Error("unknown record '" + tag + "'");
    if ((side == 0 && seen[1] > 0) || parse_bits(bits, side == 0 ? nA : nB) != seen[side]) {
      throw Error("records out of order at input " + bits);
    }
    ++seen[side];
    std::string tok;
    std::uint64_t count = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) throw Error("transition token '" + tok + "' must be <reg>:<action>");
      auto reg = static_cast<std::uint32_t>(parse_bits(std::string_view(tok).substr(0, colon), w));
      std::string act = tok.substr(colon + 1);
      std::uint32_t a = act == "s0" ? 0 : act == "s1" ? 1 : act == "h0" ? 2 : act == "h1" ? 3 : 4;
      if (a > 3) throw Error("unknown action '" + act + "'");
      (*tables)[side].push_back((reg << 2) | a);
      ++count;
    }
    if (count != pow2(w + 1)) throw Error("record for " + bits + " must list 2^(w+1) transitions");
  }
  if (seen[0] != pow2(nA) || seen[1] != pow2(nB)) throw Error("record count mismatch");
  return SProtocol(w, nA, nB, [tables, w](Party side, Input in, std::uint32_t reg, unsigned bit) -> SStep {
    std::uint32_t v = (*tables)[side == Party::Alice ? 0 : 1][(((in << w) | reg) << 1) | bit];
    return {v >> 2, static_cast<SAction>(v & 3U)};
  });
}

}  // namespace memoryless
