#include "memoryless/m_protocol.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace memoryless {

void MOneWayProtocol::validate() const {
  if (t < 0 || t > 20) throw Error("M-> message width out of range");
  if (nA < 1 || nB < 1 || nA + nB > kMaxTotalInputBits) throw ScaleError("M-> input widths out of range");
  if (schedule.size() != pow2(nA)) throw Error("schedule must list every Alice input");
  if (bobMap.size() != (pow2(nB) << t)) throw Error("Bob map must be total over 2^t messages");
  for (const auto& seq : schedule) {
    if (seq.empty()) throw Error("schedule entries must be non-empty");
    if (seq.size() > pow2(t)) throw Error("schedule longer than 2^t messages");
    for (Message m : seq) {
      if (m >= pow2(t)) throw Error("scheduled message wider than t bits");
    }
  }
}

OneWayOutcome run_m_oneway(const MOneWayProtocol& p, Input x, Input y) {
  OneWayOutcome out;
  for (Message m : p.schedule[x]) {
    ++out.rounds;
    BobOut r = p.bob(y, m);
    if (r != BobOut::Continue) {
      out.decided = true;
      out.output = static_cast<unsigned>(r);
      return out;
    }
  }
  return out;
}

VerifyReport verify_m_oneway(const MOneWayProtocol& p, const SplitFunction& f, int jobs) {
  if (p.nA != f.nA() || p.nB != f.nB()) throw Error("protocol and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    OneWayOutcome o = run_m_oneway(p, x, y);
    rounds = o.rounds;
    if (o.decided && o.output == f.at(x, y)) return true;
    detail = o.decided ? "output=" + std::to_string(o.output) : std::string("schedule exhausted");
    return false;
  });
}

MOneWayProtocol build_m_oneway_disj(int n) {
  if (n < 1 || 2 * n > kMaxTotalInputBits) throw ScaleError("DISJ requires 1 <= n <= 12");
  // Index field holds i-1, so the all-ones marker never coincides with a data message.
  const int L = ceil_log2(static_cast<std::uint64_t>(n) + 1);
  MOneWayProtocol p;
  p.t = L + 1;
  p.nA = n;
  p.nB = n;
  const auto marker = static_cast<Message>(pow2(p.t) - 1);
  p.schedule.resize(pow2(n));
  for (Input x = 0; x < pow2(n); ++x) {
    for (int i = 0; i < n; ++i) p.schedule[x].push_back(static_cast<Message>((i << 1) | bit_at(x, n, i)));
    p.schedule[x].push_back(marker);
  }
  p.bobMap.assign(pow2(n) << p.t, BobOut::Continue);
  for (Input y = 0; y < pow2(n); ++y) {
    for (Message m = 0; m < pow2(p.t); ++m) {
      auto i = static_cast<int>(m >> 1);
      BobOut r = BobOut::Continue;
      if (m == marker) {
        r = BobOut::One;
      } else if (i < n && (m & 1U) && bit_at(y, n, i)) {
        r = BobOut::Zero;
      }
      p.bobMap[(y << p.t) | m] = r;
    }
  }
  return p;
}

MOneWayProtocol build_m_oneway_qdisj(int count, int width) {
  if (count < 1 || width < 1 || 2 * count * width > kMaxTotalInputBits) throw ScaleError("QDISJ instance out of range");
  const int bits = count * width;
  MOneWayProtocol p;
  p.t = width + 1;
  p.nA = bits;
  p.nB = bits;
  auto number = [&](Input v, int i) { return (v >> ((count - 1 - i) * width)) & (pow2(width) - 1); };
  p.schedule.resize(pow2(bits));
  for (Input x = 0; x < pow2(bits); ++x) {
    std::vector<Message> distinct;
    for (int i = 0; i < count; ++i) {
      auto v = static_cast<Message>(number(x, i));
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    }
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      Message flag = i + 1 == distinct.size() ? 1 : 0;
      p.schedule[x].push_back((distinct[i] << 1) | flag);
    }
  }
  p.bobMap.assign(pow2(bits) << p.t, BobOut::Continue);
  for (Input y = 0; y < pow2(bits); ++y) {
    for (Message m = 0; m < pow2(p.t); ++m) {
      Message v = m >> 1;
      bool hit = false;
      for (int i = 0; i < count; ++i) hit = hit || number(y, i) == v;
      BobOut r = hit ? BobOut::Zero : (m & 1U) ? BobOut::One : BobOut::Continue;
      p.bobMap[(y << p.t) | m] = r;
    }
  }
  return p;
}

MOneWayProtocol build_m_oneway_qdisj(int n) {
  if (n < 2) throw Error("QDISJ requires n >= 2");
  return build_m_oneway_qdisj(n, qdisj_field_width(n));
}

MOneWayProtocol build_one_way_protocol(const SplitFunction& f) {
  std::map<std::vector<std::uint8_t>, Message> classes;
  std::vector<Message> rowClass(f.rows());
  std::vector<std::vector<std::uint8_t>> reps;
  for (Input x = 0; x < f.rows(); ++x) {
    auto begin = f.table().begin() + static_cast<std::ptrdiff_t>(x * f.cols());
    std::vector<std::uint8_t> row(begin, begin + static_cast<std::ptrdiff_t>(f.cols()));
    auto [it, inserted] = classes.emplace(row, static_cast<Message>(reps.size()));
    if (inserted) reps.push_back(row);
    rowClass[x] = it->second;
  }
  MOneWayProtocol p;
  p.t = ceil_log2(reps.size());
  p.nA = f.nA();
  p.nB = f.nB();
  p.schedule.resize(f.rows());
  for (Input x = 0; x < f.rows(); ++x) p.schedule[x] = {rowClass[x]};
  p.bobMap.assign(f.cols() << p.t, BobOut::Zero);
  for (Input y = 0; y < f.cols(); ++y) {
    for (Message c = 0; c < reps.size(); ++c) p.bobMap[(y << p.t) | c] = static_cast<BobOut>(reps[c][y]);
  }
  return p;
}

// Messages are (tag, payload, counter). Alice sends (0, sched[c], c); Bob answers CONTINUE with (1, 0, c+1).
NmProtocol m_oneway_to_nm(const MOneWayProtocol& p) {
  p.validate();
  // A zero-width schedule still needs one payload bit so that s >= 2.
  const int t = std::max(p.t, 1);
  const int s = 2 * t + 1;
  const auto mask = static_cast<Message>(pow2(t) - 1);
  auto halt = [s](unsigned b) { return static_cast<Message>(pow2(s) - 2 + b); };
  auto shared = std::make_shared<MOneWayProtocol>(p);
  return NmProtocol(s, p.nA, p.nB, [=](Party side, Input in, Message m) -> Message {
    Message tag = m >> (2 * t);
    Message payload = (m >> t) & mask;
    Message counter = m & mask;
    const auto& q = *shared;
    if (side == Party::Alice) {
      const auto& seq = q.schedule[in];
      Message pos = tag == 1 ? counter : 0;
      // Past the end of the schedule Alice repeats her last message, so a wrong protocol loops.
      if (pos >= seq.size()) pos = static_cast<Message>(seq.size() - 1);
      return (seq[pos] << t) | pos;
    }
    if (tag != 0) return 0;
    BobOut r = payload < pow2(q.t) ? q.bob(in, payload) : BobOut::Continue;
    if (r != BobOut::Continue) return halt(static_cast<unsigned>(r));
    return (Message{1} << (2 * t)) | ((counter + 1) & mask);
  });
}

std::string format_m_oneway(const MOneWayProtocol& p) {
  p.validate();
  std::string out = "t=" + std::to_string(p.t) + " na=" + std::to_string(p.nA) + " nb=" + std::to_string(p.nB) + "\n";
  for (Input x = 0; x < pow2(p.nA); ++x) {
    out += "A " + to_bits(x, p.nA);
    for (Message m : p.schedule[x]) out += " " + (p.t == 0 ? std::string("-") : to_bits(m, p.t));
    out += "\n";
  }
  for (Input y = 0; y < pow2(p.nB); ++y) {
    out += "B " + to_bits(y, p.nB) + " ";
    for (Message m = 0; m < pow2(p.t); ++m) {
      BobOut r = p.bob(y, m);
      out.push_back(r == BobOut::Zero ? '0' : r == BobOut::One ? '1' : 'C');
    }
    out += "\n";
  }
  return out;
}

MOneWayProtocol parse_m_oneway(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  MOneWayProtocol p;
  char tail = 0;
  if (std::sscanf(line.c_str(), "t=%d na=%d nb=%d%c", &p.t, &p.nA, &p.nB, &tail) != 3) {
    throw Error("malformed header: expected 't=<int> na=<int> nb=<int>'");
  }
  if (p.t < 0 || p.t > 20 || p.nA < 1 || p.nB < 1 || p.nA + p.nB > kMaxTotalInputBits) {
    throw Error("header values out of range");
  }
  p.schedule.resize(pow2(p.nA));
  p.bobMap.assign(pow2(p.nB) << p.t, BobOut::Continue);
  std::uint64_t seenA = 0;
  std::uint64_t seenB = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    std::string bits;
    ls >> tag >> bits;
    if (tag == "A") {
      if (seenB > 0 || parse_bits(bits, p.nA) != seenA) throw Error("A records out of order");
      std::string tok;
      while (ls >> tok) p.schedule[seenA].push_back(p.t == 0 ? 0 : static_cast<Message>(parse_bits(tok, p.t)));
      ++seenA;
    } else if (tag == "B") {
      if (parse_bits(bits, p.nB) != seenB) throw Error("B records out of order");
      std::string outs;
      ls >> outs;
      if (outs.size() != pow2(p.t)) throw Error("Bob record must list 2^t outputs");
      for (Message m = 0; m < pow2(p.t); ++m) {
        char c = outs[m];
        if (c != '0' && c != '1' && c != 'C') throw Error("Bob outputs must be 0, 1 or C");
        p.bobMap[(seenB << p.t) | m] = c == 'C' ? BobOut::Continue : static_cast<BobOut>(c - '0');
      }
      ++seenB;
    } else {
      throw Error("unknown record '" + tag + "'");
    }
  }
  if (seenA != pow2(p.nA) || seenB != pow2(p.nB)) throw Error("record count mismatch");
  p.validate();
  return p;
}

MProtocol build_generic_m(const SplitFunction& f) {
  const int idxBits = std::max(1, ceil_log2(static_cast<std::uint64_t>(f.nB())));
  MProtocol p;
  p.t = idxBits + 1;
  p.nA = f.nA();
  p.nB = f.nB();
  const int nB = f.nB();
  const int t = p.t;
  auto fn = std::make_shared<SplitFunction>(f);
  p.alice = [fn, nB, t](Input x, const std::vector<Message>& replies) -> Message {
    if (static_cast<int>(replies.size()) < nB) return static_cast<Message>(replies.size());
    Input y = 0;
    for (int i = 0; i < nB; ++i) y = (y << 1) | (replies[static_cast<std::size_t>(i)] & 1U);
    return static_cast<Message>(pow2(t) - 2 + fn->at(x, y));
  };
  p.bobMap.assign(pow2(nB) << t, 0);
  for (Input y = 0; y < pow2(nB); ++y) {
    for (Message m = 0; m < pow2(t); ++m) {
      Message v = m;
      if (!p.is_halting(m)) v = m < static_cast<Message>(nB) ? bit_at(y, nB, static_cast<int>(m)) : 0;
      p.bobMap[(y << t) | m] = v;
    }
  }
  return p;
}

OneWayOutcome run_m(const MProtocol& p, Input x, Input y, int roundCap) {
  OneWayOutcome out;
  std::vector<Message> replies;
  for (int r = 0; r < roundCap; ++r) {
    Message m = p.alice(x, replies);
    ++out.rounds;
    if (p.is_halting(m)) {
      out.decided = true;
      out.output = m & 1U;
      return out;
    }
    Message b = p.bobMap[(y << p.t) | m];
    if (p.is_halting(b)) {
      out.decided = true;
      out.output = b & 1U;
      return out;
    }
    replies.push_back(b);
  }
  return out;
}

VerifyReport verify_m(const MProtocol& p, const SplitFunction& f, int jobs) {
  if (p.nA != f.nA() || p.nB != f.nB()) throw Error("protocol and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int& rounds, std::string& detail) {
    OneWayOutcome o = run_m(p, x, y);
    rounds = o.rounds;
    if (o.decided && o.output == f.at(x, y)) return true;
    detail = o.decided ? "output=" + std::to_string(o.output) : std::string("round cap reached");
    return false;
  });
}

}  // namespace memoryless
