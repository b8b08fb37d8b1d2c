#include "memoryless/gardenhose.hpp"

#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

namespace memoryless {

namespace {

void check_matching(const std::vector<int>& mate, int pipes, int tap, const std::string& where) {
  if (mate.size() != static_cast<std::size_t>(pipes) + 1) throw Error(where + ": matching must cover every opening");
  for (int i = 1; i <= pipes; ++i) {
    int j = mate[static_cast<std::size_t>(i)];
    if (j == 0) continue;
    if (j < 0 || j > pipes) throw Error(where + ": opening out of range");
    if (j == i) throw Error(where + ": opening hosed to itself");
    if (mate[static_cast<std::size_t>(j)] != i) throw Error(where + ": opening used by two hoses");
    if (i == tap) throw Error(where + ": tap opening is also hosed");
  }
}

constexpr std::uint64_t kMaxPipes = std::uint64_t{1} << 20;

}  // namespace

GhConfig::GhConfig(int pipes, int nA, int nB, std::vector<int> tap, std::vector<std::vector<int>> aliceMate,
                   std::vector<std::vector<int>> bobMate)
    : pipes_(pipes), nA_(nA), nB_(nB), tap_(std::move(tap)), aliceMate_(std::move(aliceMate)), bobMate_(std::move(bobMate)) {
  if (pipes < 1 || static_cast<std::uint64_t>(pipes) > kMaxPipes) throw Error("pipe count out of range");
  if (nA < 1 || nB < 1 || nA > kMaxTotalInputBits || nB > kMaxTotalInputBits) throw Error("input widths out of range");
  if (tap_.size() != pow2(nA) || aliceMate_.size() != pow2(nA)) throw Error("Alice records must cover every input");
  if (bobMate_.size() != pow2(nB)) throw Error("Bob records must cover every input");
  for (Input x = 0; x < pow2(nA); ++x) {
    if (tap_[x] < 1 || tap_[x] > pipes) throw Error("tap opening out of range for x=" + to_bits(x, nA));
    check_matching(aliceMate_[x], pipes, tap_[x], "Alice x=" + to_bits(x, nA));
  }
  for (Input y = 0; y < pow2(nB); ++y) check_matching(bobMate_[y], pipes, 0, "Bob y=" + to_bits(y, nB));
}

FlowResult simulate_flow(const GhConfig& c, Input x, Input y) {
  if (x >= pow2(c.nA()) || y >= pow2(c.nB())) throw Error("input index out of range");
  FlowResult r;
  int pipe = c.tap(x);
  r.path.push_back({Party::Alice, pipe});
  Party side = Party::Bob;
  for (int guard = 0; guard <= 2 * c.pipes() + 2; ++guard) {
    r.path.push_back({side, pipe});
    int next = c.mate(side, side == Party::Alice ? x : y, pipe);
    if (next == 0) {
      r.spillSide = side;
      r.output = side == Party::Bob ? 1 : 0;
      return r;
    }
    r.path.push_back({side, next});
    pipe = next;
    side = other(side);
  }
  throw Error("water path did not terminate");
}

VerifyReport verify_gh(const GhConfig& c, const SplitFunction& f, int jobs) {
  if (c.nA() != f.nA() || c.nB() != f.nB()) throw Error("config and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    FlowResult r = simulate_flow(c, x, y);
    rounds = static_cast<int>(r.path.size());
    if (r.output == f.at(x, y)) return true;
    detail = std::string("spill=") + to_string(r.spillSide);
    return false;
  });
}

VerifyReport compare_gh_nm(const GhConfig& c, const NmProtocol& p, int jobs) {
  if (c.nA() != p.nA() || c.nB() != p.nB()) throw Error("config and protocol input widths differ");
  return verify_all_pairs(pow2(c.nA()), pow2(c.nB()), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    FlowResult r = simulate_flow(c, x, y);
    ExecutionTrace t = run_nm(p, x, y);
    rounds = t.rounds;
    if (t.outcome == Outcome::Halted && t.output == r.output) return true;
    detail = std::string("spill=") + to_string(r.spillSide) + " protocol " + describe(t, p.s());
    return false;
  });
}

NmProtocol gh_to_nm(const GhConfig& c) {
  const int s = std::max(2, ceil_log2(static_cast<std::uint64_t>(c.pipes()) + 3));
  const auto halt0 = static_cast<Message>(pow2(s) - 2);
  auto cfg = std::make_shared<GhConfig>(c);
  return NmProtocol(s, c.nA(), c.nB(), [cfg, halt0](Party side, Input in, Message m) -> Message {
    const int pipes = cfg->pipes();
    if (side == Party::Alice) {
      if (m == 0 || m > static_cast<Message>(pipes)) return static_cast<Message>(cfg->tap(in));
      int v = cfg->mate(Party::Alice, in, static_cast<int>(m));
      return v == 0 ? halt0 : static_cast<Message>(v);
    }
    if (m == 0 || m > static_cast<Message>(pipes)) return 0;
    int v = cfg->mate(Party::Bob, in, static_cast<int>(m));
    return v == 0 ? halt0 + 1 : static_cast<Message>(v);
  });
}

// Each reachable node v gets a forward pipe v^f and a reverse pipe v^r. For every target, its claimants are
// chained in increasing message order: first claimant's f meets the target's f, each later claimant's f meets
// the previous claimant's r, the last claimant's r meets the target's r. Unclaimed targets join their own f and r.
GhConfig nm_to_gh(const NmProtocol& p, int jobs) {
  VerifyReport halts = verify_all_pairs(pow2(p.nA()), pow2(p.nB()), jobs, [&](Input x, Input y, int&, std::string& detail) {
    ExecutionTrace t = run_nm(p, x, y);
    detail = describe(t, p.s());
    return t.outcome == Outcome::Halted;
  });
  if (!halts.correct) {
    const auto& f = halts.failures.front();
    throw Error("protocol does not halt on x=" + to_bits(f.x, p.nA()) + " y=" + to_bits(f.y, p.nB()) + ": " + f.detail);
  }

  // Nodes reachable from Alice's start over all inputs.
  std::map<Message, int> aliceIdx;
  std::map<Message, int> bobIdx;
  std::deque<std::pair<Party, Message>> queue{{Party::Alice, 0}};
  aliceIdx[0] = 0;
  bool usesT1A = false;
  bool usesT0B = false;
  while (!queue.empty()) {
    auto [side, m] = queue.front();
    queue.pop_front();
    for (Input in = 0; in < p.input_count(side); ++in) {
      Message t = p.reply(side, in, m);
      if (p.is_halting(t)) {
        unsigned b = p.halt_output(t);
        if (side == Party::Alice && b == 1) usesT1A = true;
        if (side == Party::Bob && b == 0) usesT0B = true;
        continue;
      }
      auto& idx = side == Party::Alice ? bobIdx : aliceIdx;
      if (idx.emplace(t, 0).second) {
        if (idx.size() * 4 > kMaxPipes) throw ScaleError("too many reachable messages for a hose layout");
        queue.emplace_back(other(side), t);
      }
    }
  }
  int next = 1;
  for (auto& [m, id] : aliceIdx) { id = next; next += 2; }
  for (auto& [m, id] : bobIdx) { id = next; next += 2; }
  const int startF = next++;
  const int startR = next++;
  const int t1a = usesT1A ? next++ : 0;
  const int t0b = usesT0B ? next++ : 0;
  const int pipes = next - 1;

  auto hose = [](std::vector<int>& mate, int u, int v) {
    mate[static_cast<std::size_t>(u)] = v;
    mate[static_cast<std::size_t>(v)] = u;
  };
  // claimants lists hold (forward, reverse) pipe pairs in increasing message order.
  using Claims = std::vector<std::pair<int, int>>;
  auto chain = [&](std::vector<int>& mate, const Claims& cl, int targetF, int targetR) {
    if (cl.empty()) {
      hose(mate, targetF, targetR);
      return;
    }
    hose(mate, cl.front().first, targetF);
    for (std::size_t i = 1; i < cl.size(); ++i) hose(mate, cl[i].first, cl[i - 1].second);
    if (targetR) hose(mate, cl.back().second, targetR);
  };
  auto sink_chain = [&](std::vector<int>& mate, const Claims& cl, int terminal) {
    if (cl.empty()) return;
    hose(mate, cl.front().first, terminal);
    for (std::size_t i = 1; i < cl.size(); ++i) hose(mate, cl[i].first, cl[i - 1].second);
  };

  std::vector<int> tap(pow2(p.nA()), startF);
  std::vector<std::vector<int>> aliceMate(pow2(p.nA()));
  std::vector<std::vector<int>> bobMate(pow2(p.nB()));
  parallel_for(pow2(p.nA()), jobs, [&](std::uint64_t x) {
    std::vector<int> mate(static_cast<std::size_t>(pipes) + 1, 0);
    std::map<Message, Claims> groups;
    Claims toOne;
    for (const auto& [m, id] : aliceIdx) {
      Message t = p.reply(Party::Alice, x, m);
      if (!p.is_halting(t)) {
        groups[t].emplace_back(id, id + 1);
      } else if (p.halt_output(t) == 1) {
        toOne.emplace_back(id, id + 1);
      }
      // Claimants of halt 0 keep their forward opening free so the water spills on Alice's side.
    }
    for (const auto& [j, id] : bobIdx) {
      auto it = groups.find(j);
      chain(mate, it == groups.end() ? Claims{} : it->second, id, id + 1);
    }
    sink_chain(mate, toOne, t1a);
    aliceMate[x] = std::move(mate);
  });
  parallel_for(pow2(p.nB()), jobs, [&](std::uint64_t y) {
    std::vector<int> mate(static_cast<std::size_t>(pipes) + 1, 0);
    std::map<Message, Claims> groups;
    groups[0].emplace_back(startF, startR);
    Claims toZero;
    for (const auto& [j, id] : bobIdx) {
      Message t = p.reply(Party::Bob, y, j);
      if (!p.is_halting(t)) {
        groups[t].emplace_back(id, id + 1);
      } else if (p.halt_output(t) == 0) {
        toZero.emplace_back(id, id + 1);
      }
    }
    for (const auto& [m, id] : aliceIdx) {
      auto it = groups.find(m);
      chain(mate, it == groups.end() ? Claims{} : it->second, id, id + 1);
    }
    sink_chain(mate, toZero, t0b);
    bobMate[y] = std::move(mate);
  });
  return GhConfig(pipes, p.nA(), p.nB(), std::move(tap), std::move(aliceMate), std::move(bobMate));
}

GhConfig build_gh_isa(const IsaParams& params) {
  if (params.m > 8) throw ScaleError("ISA garden-hose construction requires m <= 8");
  return nm_to_gh(build_isa_nm(params));
}

GhConfig build_gh_qdisj(int count, int width) {
  return nm_to_gh(m_oneway_to_nm(build_m_oneway_qdisj(count, width)));
}

GhConfig build_gh_qdisj(int n) {
  if (n < 2 || n > 4) throw ScaleError("QDISJ garden-hose construction requires 2 <= n <= 4");
  return build_gh_qdisj(n, qdisj_field_width(n));
}

std::string format_gh(const GhConfig& c) {
  std::string out =
      "pipes=" + std::to_string(c.pipes()) + " na=" + std::to_string(c.nA()) + " nb=" + std::to_string(c.nB()) + "\n";
  auto pairs = [&](Party side, Input in) {
    std::string s;
    for (int u = 1; u <= c.pipes(); ++u) {
      int v = c.mate(side, in, u);
      if (v > u) s += " " + std::to_string(u) + "-" + std::to_string(v);
    }
    return s;
  };
  for (Input x = 0; x < pow2(c.nA()); ++x) {
    out += "A " + to_bits(x, c.nA()) + " tap=" + std::to_string(c.tap(x)) + pairs(Party::Alice, x) + "\n";
  }
  for (Input y = 0; y < pow2(c.nB()); ++y) out += "B " + to_bits(y, c.nB()) + pairs(Party::Bob, y) + "\n";
  return out;
}

GhConfig parse_gh(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int pipes = 0;
  int nA = 0;
  int nB = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "pipes=%d na=%d nb=%d%c", &pipes, &nA, &nB, &tail) != 3) {
    throw Error("malformed header: expected 'pipes=<int> na=<int> nb=<int>'");
  }
  if (pipes < 1 || static_cast<std::uint64_t>(pipes) > kMaxPipes || nA < 1 || nB < 1 || nA + nB > kMaxTotalInputBits) {
    throw Error("header values out of range");
  }
  std::vector<int> tap(pow2(nA), 0);
  std::vector<std::vector<int>> mates[2] = {std::vector<std::vector<int>>(pow2(nA)), std::vector<std::vector<int>>(pow2(nB))};
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
    Input v = seen[side]++;
    std::vector<int> mate(static_cast<std::size_t>(pipes) + 1, 0);
    std::string tok;
    while (ls >> tok) {
      if (side == 0 && tok.rfind("tap=", 0) == 0) {
        tap[v] = std::stoi(tok.substr(4));
        continue;
      }
      int u = 0;
      int w = 0;
      char dash = 0;
      std::istringstream ts(tok);
      if (!(ts >> u >> dash >> w) || dash != '-' || u < 1 || w < 1 || u > pipes || w > pipes) {
        throw Error("bad hose '" + tok + "'");
      }
      if (mate[static_cast<std::size_t>(u)] || mate[static_cast<std::size_t>(w)]) throw Error("opening used by two hoses in '" + tok + "'");
      mate[static_cast<std::size_t>(u)] = w;
      mate[static_cast<std::size_t>(w)] = u;
    }
    if (side == 0 && tap[v] == 0) throw Error("Alice record " + bits + " lacks tap=");
    mates[side][v] = std::move(mate);
  }
  if (seen[0] != pow2(nA) || seen[1] != pow2(nB)) throw Error("record count mismatch");
  return GhConfig(pipes, nA, nB, std::move(tap), std::move(mates[0]), std::move(mates[1]));
}

}  // namespace memoryless
