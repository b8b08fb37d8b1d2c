#include "memoryless/nm_protocol.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace memoryless {

namespace {

// Message layout helpers: fields packed most significant first.
struct Fields {
  Message pack(std::initializer_list<std::pair<Message, int>> parts) const {
    Message m = 0;
    for (auto [v, w] : parts) m = (m << w) | (v & static_cast<Message>(pow2(w) - 1));
    return m;
  }
};

Message field_of(Message m, int shift, int width) {
  return (m >> shift) & static_cast<Message>(pow2(width) - 1);
}

std::uint64_t state_key(Party p, Message m) {
  return (static_cast<std::uint64_t>(m) << 1) | (p == Party::Bob ? 1U : 0U);
}

ExecutionTrace execute(const NmProtocol& p, Input x, Input y, std::uint64_t cap, bool capIsLimit, bool record) {
  ExecutionTrace t;
  // Any walk longer than the number of non-halting (sender, message) states must repeat one.
  const std::uint64_t bound = 2 * (p.messages() - 2) + 1;
  Party sender = Party::Alice;
  Message msg = p.reply(Party::Alice, x, 0);
  std::unordered_set<std::uint64_t> seen;
  bool tracking = false;
  std::uint64_t sent = 0;
  for (;;) {
    ++sent;
    t.rounds = static_cast<int>(std::min<std::uint64_t>(sent, INT32_MAX));
    if (record) t.messages.push_back({sender, msg});
    if (p.is_halting(msg)) {
      t.outcome = Outcome::Halted;
      t.output = p.halt_output(msg);
      return t;
    }
    if (capIsLimit && sent >= cap) {
      t.outcome = Outcome::RoundLimitExceeded;
      return t;
    }
    if (tracking) {
      if (!seen.insert(state_key(sender, msg)).second) {
        t.outcome = Outcome::NonHalting;
        t.witness = {sender, msg};
        return t;
      }
    } else if (sent > bound) {
      // Rare path: replay with explicit state tracking to report the first repeated state.
      tracking = true;
      sender = Party::Alice;
      msg = p.reply(Party::Alice, x, 0);
      sent = 0;
      t.messages.clear();
      seen.clear();
      continue;
    }
    Party next = other(sender);
    msg = p.reply(next, next == Party::Alice ? x : y, msg);
    sender = next;
  }
}

}  // namespace

NmProtocol::NmProtocol(int s, int nA, int nB, Rule rule) : s_(s), nA_(nA), nB_(nB), rule_(std::move(rule)) {
  check_shape();
  std::uint64_t entries = (pow2(nA) + pow2(nB)) << s;
  if (entries <= kDenseLimit) {
    alice_.resize(pow2(nA) << s);
    bob_.resize(pow2(nB) << s);
    for (int side = 0; side < 2; ++side) {
      Party p = side == 0 ? Party::Alice : Party::Bob;
      auto& t = side == 0 ? alice_ : bob_;
      for (Input in = 0; in < input_count(p); ++in) {
        for (Message m = 0; m < messages(); ++m) {
          Message v = is_halting(m) ? m : rule_(p, in, m);
          if (v >= messages()) throw Error("protocol rule produced a message wider than s");
          t[(in << s) | m] = v;
        }
      }
    }
    dense_ = true;
    rule_ = nullptr;
  }
}

NmProtocol NmProtocol::from_tables(int s, int nA, int nB, std::vector<Message> alice, std::vector<Message> bob) {
  NmProtocol p;
  p.s_ = s;
  p.nA_ = nA;
  p.nB_ = nB;
  p.check_shape();
  if (alice.size() != (pow2(nA) << s) || bob.size() != (pow2(nB) << s)) {
    throw Error("protocol tables must be total over 2^s messages");
  }
  for (auto* t : {&alice, &bob}) {
    for (std::size_t i = 0; i < t->size(); ++i) {
      if ((*t)[i] >= p.messages()) throw Error("table entry wider than s bits");
      auto m = static_cast<Message>(i & (p.messages() - 1));
      if (p.is_halting(m)) (*t)[i] = m;
    }
  }
  p.alice_ = std::move(alice);
  p.bob_ = std::move(bob);
  p.dense_ = true;
  return p;
}

void NmProtocol::check_shape() const {
  if (s_ < 2) throw Error("message width s must be at least 2");
  if (s_ > kMaxWidth) throw ScaleError("message width " + std::to_string(s_) + " exceeds " + std::to_string(kMaxWidth));
  if (nA_ < 1 || nB_ < 1) throw Error("input widths must be at least 1");
  if (nA_ > kMaxTotalInputBits || nB_ > kMaxTotalInputBits) throw ScaleError("input width exceeds the desk-scale limit");
}

std::string describe(const ExecutionTrace& t, int s) {
  switch (t.outcome) {
    case Outcome::Halted:
      return "halted output=" + std::to_string(t.output) + " rounds=" + std::to_string(t.rounds);
    case Outcome::NonHalting:
      return std::string("nonhalting witness=") + to_string(t.witness.sender) + ":" + to_bits(t.witness.msg, s);
    case Outcome::RoundLimitExceeded:
      return "round-limit-exceeded rounds=" + std::to_string(t.rounds);
  }
  return "";
}

ExecutionTrace run_nm(const NmProtocol& p, Input x, Input y, bool record) {
  return execute(p, x, y, 0, false, record);
}

ExecutionTrace run_nm(const NmProtocol& p, const SplitFunction& f, Input x, Input y, bool record) {
  if (p.nA() != f.nA() || p.nB() != f.nB()) throw Error("protocol and function input widths differ");
  if (x >= f.rows() || y >= f.cols()) throw Error("input index out of range");
  return run_nm(p, x, y, record);
}

ExecutionTrace run_nm_rounds(const NmProtocol& p, Input x, Input y, int k, bool record) {
  if (k < 1) throw Error("round cap must be at least 1");
  return execute(p, x, y, static_cast<std::uint64_t>(k), true, record);
}

VerifyReport verify_protocol(const NmProtocol& p, const SplitFunction& f, int jobs) {
  if (p.nA() != f.nA() || p.nB() != f.nB()) throw Error("protocol and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    ExecutionTrace t = run_nm(p, x, y);
    rounds = t.rounds;
    if (t.outcome == Outcome::Halted && t.output == f.at(x, y)) return true;
    detail = describe(t, p.s()) + " expected=" + std::to_string(f.at(x, y));
    return false;
  });
}

VerifyReport compare_protocols(const NmProtocol& p, const NmProtocol& q, int jobs) {
  if (p.nA() != q.nA() || p.nB() != q.nB()) throw Error("protocol input widths differ");
  return verify_all_pairs(pow2(p.nA()), pow2(p.nB()), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    ExecutionTrace a = run_nm(p, x, y);
    ExecutionTrace b = run_nm(q, x, y);
    rounds = b.rounds;
    if (a.outcome == Outcome::Halted && b.outcome == Outcome::Halted && a.output == b.output) return true;
    detail = "left " + describe(a, p.s()) + " right " + describe(b, q.s());
    return false;
  });
}

// EQ: Alice sends (i, x_i); Bob halts 0 on a mismatch, 1 after the last index, else acknowledges (i, 1).
NmProtocol build_eq(int n) {
  if (n < 1 || n > kMaxTotalInputBits / 2) throw ScaleError("EQ requires 1 <= n <= 12");
  const int L = ceil_log2(static_cast<std::uint64_t>(n) + 1);
  const int s = L + 1;
  Fields F;
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, n, n, [=](Party side, Input in, Message m) -> Message {
    auto idx = static_cast<int>(m >> 1);
    unsigned bit = m & 1U;
    if (side == Party::Alice) {
      if (bit == 1 && idx + 1 < n) return F.pack({{static_cast<Message>(idx + 1), L}, {bit_at(in, n, idx + 1), 1}});
      return F.pack({{0, L}, {bit_at(in, n, 0), 1}});
    }
    if (idx >= n) return 0;
    if (bit != bit_at(in, n, idx)) return halt(0);
    if (idx == n - 1) return halt(1);
    return F.pack({{static_cast<Message>(idx), L}, {1, 1}});
  });
}

// IP: Alice sends (i, x_i, acc); Bob folds x_i*y_i into acc and halts with it after the last index.
NmProtocol build_ip(int n) {
  if (n < 1 || n > kMaxTotalInputBits / 2) throw ScaleError("IP requires 1 <= n <= 12");
  const int L = ceil_log2(static_cast<std::uint64_t>(n) + 1);
  const int s = L + 2;
  Fields F;
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, n, n, [=](Party side, Input in, Message m) -> Message {
    auto idx = static_cast<int>(field_of(m, 2, L));
    unsigned flag = field_of(m, 1, 1);
    unsigned acc = m & 1U;
    if (side == Party::Alice) {
      if (flag == 1 && idx + 1 < n) {
        return F.pack({{static_cast<Message>(idx + 1), L}, {bit_at(in, n, idx + 1), 1}, {acc, 1}});
      }
      return F.pack({{0, L}, {bit_at(in, n, 0), 1}, {0, 1}});
    }
    if (idx >= n) return 0;
    unsigned next = acc ^ (flag & bit_at(in, n, idx));
    if (idx == n - 1) return halt(next);
    return F.pack({{static_cast<Message>(idx), L}, {1, 1}, {next, 1}});
  });
}

// DISJ: positions are 1-based, 0 is the start. Each side names its next 1-position after the one received.
NmProtocol build_disj(int n) {
  if (n < 1 || n > kMaxTotalInputBits / 2) throw ScaleError("DISJ requires 1 <= n <= 12");
  const int s = std::max(2, ceil_log2(static_cast<std::uint64_t>(n) + 3));
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, n, n, [=](Party, Input in, Message m) -> Message {
    auto j = static_cast<int>(m);
    if (j > n) j = 0;
    if (j >= 1 && bit_at(in, n, j - 1)) return halt(0);
    for (int k = j + 1; k <= n; ++k) {
      if (bit_at(in, n, k - 1)) return static_cast<Message>(k);
    }
    return halt(1);
  });
}

// MAJ: like IP but carries a count of agreeing ones.
NmProtocol build_maj(int n) {
  if (n < 1 || n > kMaxTotalInputBits / 2) throw ScaleError("MAJ requires 1 <= n <= 12");
  const int L = ceil_log2(static_cast<std::uint64_t>(n) + 1);
  const int C = ceil_log2(static_cast<std::uint64_t>(n) + 1);
  const int s = L + 1 + C;
  Fields F;
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, n, n, [=](Party side, Input in, Message m) -> Message {
    auto idx = static_cast<int>(field_of(m, C + 1, L));
    unsigned flag = field_of(m, C, 1);
    Message count = field_of(m, 0, C);
    if (side == Party::Alice) {
      if (flag == 1 && idx + 1 < n) {
        return F.pack({{static_cast<Message>(idx + 1), L}, {bit_at(in, n, idx + 1), 1}, {count, C}});
      }
      return F.pack({{0, L}, {bit_at(in, n, 0), 1}, {0, C}});
    }
    if (idx >= n) return 0;
    Message next = count + (flag & bit_at(in, n, idx));
    if (idx == n - 1) return halt(2 * next >= static_cast<Message>(n) + 2 ? 1 : 0);
    return F.pack({{static_cast<Message>(idx), L}, {1, 1}, {next, C}});
  });
}

NmProtocol build_parity(int n) {
  if (n < 1 || n > kMaxTotalInputBits / 2) throw ScaleError("PARITY requires 1 <= n <= 12");
  return NmProtocol(2, n, n, [](Party side, Input in, Message m) -> Message {
    if (side == Party::Alice) return parity(in);
    return 2 + ((m & 1U) ^ parity(in));
  });
}

NmProtocol build_isa_nm(const IsaParams& p) {
  const int payload = std::max(p.k, p.logm);
  const int s = payload + 2;
  const int blocks = 1 << p.k;
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  return NmProtocol(s, p.nA(), p.nB(), [=](Party side, Input in, Message m) -> Message {
    Message tag = m >> payload;
    Message v = m & static_cast<Message>(pow2(payload) - 1);
    if (side == Party::Alice) {
      if (tag == 1 && v < static_cast<Message>(p.m)) return halt(bit_at(in >> p.k, p.m, static_cast<int>(v)));
      return static_cast<Message>(in & (pow2(p.k) - 1));
    }
    if (tag != 0 || v >= static_cast<Message>(blocks)) return 0;
    auto block = (in >> ((blocks - 1 - static_cast<int>(v)) * p.logm)) & (pow2(p.logm) - 1);
    return static_cast<Message>((1U << payload) | block);
  });
}

double target_width(const std::string& name, int n) {
  double lg = std::log2(static_cast<double>(n));
  if (name == "eq") return lg + 1;
  if (name == "ip") return lg + 2;
  if (name == "disj") return lg;
  if (name == "maj") return 2 * lg + 1;
  if (name == "parity") return 1;
  if (name == "isa") {
    IsaParams p = IsaParams::from_m(n);
    return std::log2(static_cast<double>(p.n()));
  }
  throw Error("no target cost for '" + name + "'");
}

std::string format_nm(const NmProtocol& p) {
  std::uint64_t entries = (p.input_count(Party::Alice) + p.input_count(Party::Bob)) * p.messages();
  if (entries > NmProtocol::kDenseLimit) throw ScaleError("protocol too large to serialize");
  std::string out = "s=" + std::to_string(p.s()) + " na=" + std::to_string(p.nA()) + " nb=" + std::to_string(p.nB()) + "\n";
  for (Party side : {Party::Alice, Party::Bob}) {
    int w = side == Party::Alice ? p.nA() : p.nB();
    for (Input in = 0; in < p.input_count(side); ++in) {
      out += side == Party::Alice ? "A " : "B ";
      out += to_bits(in, w);
      for (Message m = 0; m < p.messages(); ++m) {
        out.push_back(' ');
        out += to_bits(p.reply(side, in, m), p.s());
      }
      out.push_back('\n');
    }
  }
  return out;
}

NmProtocol parse_nm(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int s = 0;
  int nA = 0;
  int nB = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "s=%d na=%d nb=%d%c", &s, &nA, &nB, &tail) != 3) {
    throw Error("malformed header: expected 's=<int> na=<int> nb=<int>'");
  }
  if (s < 2 || s > 20 || nA < 1 || nB < 1 || nA > kMaxTotalInputBits || nB > kMaxTotalInputBits) {
    throw Error("header values out of range");
  }
  std::vector<Message> tables[2];
  tables[0].reserve(pow2(nA) << s);
  tables[1].reserve(pow2(nB) << s);
  std::uint64_t expected[2] = {pow2(nA), pow2(nB)};
  std::uint64_t seen[2] = {0, 0};
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    std::string inputBits;
    ls >> tag >> inputBits;
    int side = tag == "A" ? 0 : tag == "B" ? 1 : -1;
    if (side < 0) throw Error("unknown record '" + tag + "'");
    if (side == 0 && seen[1] > 0) throw Error("A records must precede B records");
    Input v = parse_bits(inputBits, side == 0 ? nA : nB);
    if (v != seen[side]) throw Error("records out of order at input " + inputBits);
    ++seen[side];
    std::string tok;
    std::uint64_t count = 0;
    while (ls >> tok) {
      tables[side].push_back(static_cast<Message>(parse_bits(tok, s)));
      ++count;
    }
    if (count != pow2(s)) throw Error("record for " + inputBits + " must list 2^s messages");
  }
  if (seen[0] != expected[0] || seen[1] != expected[1]) throw Error("record count mismatch");
  return NmProtocol::from_tables(s, nA, nB, std::move(tables[0]), std::move(tables[1]));
}

NmProtocol load_nm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_nm(ss.str());
}

void save_nm(const NmProtocol& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << format_nm(p);
}

}  // namespace memoryless
