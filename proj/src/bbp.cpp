#include "memoryless/bbp.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <sstream>

namespace memoryless {

namespace {

constexpr int kMaxSelectorTableBits = 20;

int owner_bits(const Gbbp& g, NodeKind k) { return k == NodeKind::Alice ? g.nA() : g.nB(); }

Selector constant_selector(int bits) {
  Selector s;
  if (bits <= kMaxSelectorTableBits) {
    s.table.assign(pow2(bits), 0);
  } else {
    s.rule = [](Input) { return 0U; };
  }
  return s;
}

NodeKind opposite(NodeKind k) { return k == NodeKind::Alice ? NodeKind::Bob : NodeKind::Alice; }

const char* kind_token(NodeKind k) {
  switch (k) {
    case NodeKind::Alice: return "A";
    case NodeKind::Bob: return "B";
    case NodeKind::Sink0: return "S0";
    case NodeKind::Sink1: return "S1";
  }
  return "S0";
}

}  // namespace

Gbbp::Gbbp(int nA, int nB, int start, std::vector<GbbpNode> nodes)
    : nA_(nA), nB_(nB), start_(start), nodes_(std::move(nodes)) {
  if (nA < 1 || nB < 1 || nA > 64 || nB > 64) throw Error("input widths out of range");
  const int n = size();
  if (start < 0 || start >= n) throw Error("start node out of range");
  for (int id = 0; id < n; ++id) {
    const auto& v = nodes_[static_cast<std::size_t>(id)];
    if (is_sink(v.kind)) {
      if (!v.succ.empty()) throw Error("sink " + std::to_string(id) + " has out-edges");
      continue;
    }
    if (v.succ.empty()) throw Error("node " + std::to_string(id) + " has no out-edges");
    for (int t : v.succ) {
      if (t < 0 || t >= n) throw Error("node " + std::to_string(id) + " has an edge out of range");
      if (t == id) throw Error("node " + std::to_string(id) + " has a self-loop");
    }
    int bits = v.kind == NodeKind::Alice ? nA : nB;
    if (v.selector.rule) continue;
    if (bits > kMaxSelectorTableBits || v.selector.table.size() != pow2(bits)) {
      throw Error("selector of node " + std::to_string(id) + " is not total over its owner's inputs");
    }
    for (auto e : v.selector.table) {
      if (e >= v.succ.size()) throw Error("selector of node " + std::to_string(id) + " exceeds its out-degree");
    }
  }
  // Iterative DFS cycle check: 0 unvisited, 1 on stack, 2 done.
  std::vector<std::uint8_t> color(static_cast<std::size_t>(n), 0);
  for (int root = 0; root < n; ++root) {
    if (color[static_cast<std::size_t>(root)]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    color[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      auto& [u, i] = stack.back();
      const auto& succ = nodes_[static_cast<std::size_t>(u)].succ;
      if (i < succ.size()) {
        int v = succ[i++];
        auto& c = color[static_cast<std::size_t>(v)];
        if (c == 1) throw Error("branching program has a cycle through node " + std::to_string(v));
        if (c == 0) {
          c = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        color[static_cast<std::size_t>(u)] = 2;
        stack.pop_back();
      }
    }
  }
}

int Gbbp::k() const {
  std::size_t k = 0;
  for (const auto& v : nodes_) k = std::max(k, v.succ.size());
  return static_cast<int>(k);
}

int Gbbp::part_size(NodeKind owner) const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [&](const GbbpNode& v) { return v.kind == owner; }));
}

bool Gbbp::alternating() const {
  if (node(start_).kind == NodeKind::Bob) return false;
  for (const auto& v : nodes_) {
    for (int t : v.succ) {
      if (node(t).kind == v.kind) return false;
    }
  }
  return true;
}

bool Gbbp::binary() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const GbbpNode& v) { return is_sink(v.kind) || v.succ.size() == 2; });
}

unsigned Gbbp::eval(Input x, Input y) const {
  int u = start_;
  for (;;) {
    const auto& v = node(u);
    if (v.kind == NodeKind::Sink0) return 0;
    if (v.kind == NodeKind::Sink1) return 1;
    u = v.succ[v.selector(v.kind == NodeKind::Alice ? x : y)];
  }
}

unsigned eval_gbbp(const Gbbp& g, Input x, Input y) { return g.eval(x, y); }

VerifyReport verify_gbbp(const Gbbp& g, const SplitFunction& f, int jobs) {
  if (g.nA() != f.nA() || g.nB() != f.nB()) throw Error("program and function input widths differ");
  return verify_all_pairs(f.rows(), f.cols(), jobs, [&](Input x, Input y, int&, std::string& detail) {
    unsigned b = g.eval(x, y);
    if (b == f.at(x, y)) return true;
    detail = "output=" + std::to_string(b);
    return false;
  });
}

unsigned Bp::eval(Input x, Input y) const {
  int u = start;
  for (;;) {
    const auto& v = nodes[static_cast<std::size_t>(u)];
    if (v.kind == NodeKind::Sink0) return 0;
    if (v.kind == NodeKind::Sink1) return 1;
    unsigned b = v.var < nA ? bit_at(x, nA, v.var) : bit_at(y, nB, v.var - nA);
    u = b ? v.succ1 : v.succ0;
  }
}

Gbbp Bp::to_gbbp() const {
  std::vector<GbbpNode> out;
  for (const auto& v : nodes) {
    GbbpNode g;
    if (is_sink(v.kind)) {
      g.kind = v.kind;
    } else {
      bool alice = v.var < nA;
      g.kind = alice ? NodeKind::Alice : NodeKind::Bob;
      g.succ = {v.succ0, v.succ1};
      int bits = alice ? nA : nB;
      int var = alice ? v.var : v.var - nA;
      g.selector.table.resize(pow2(bits));
      for (Input in = 0; in < pow2(bits); ++in) g.selector.table[in] = bit_at(in, bits, var);
    }
    out.push_back(std::move(g));
  }
  return Gbbp(nA, nB, start, std::move(out));
}

Gbbp nm_to_gbbp(const NmProtocol& p) {
  const int s = p.s();
  if (std::max(p.nA(), p.nB()) > kMaxSelectorTableBits) throw ScaleError("input space too large for selector tables");
  auto key = [](Party side, Message m) { return (static_cast<std::uint64_t>(m) << 1) | (side == Party::Bob ? 1U : 0U); };
  struct Pending {
    Party side;
    Message msg;
    std::vector<Message> targets;  // distinct outgoing messages, sorted
    std::vector<std::uint32_t> table;
  };
  std::map<std::uint64_t, int> index;
  std::vector<Pending> internal;
  std::deque<std::pair<Party, Message>> queue{{Party::Alice, 0}};
  index[key(Party::Alice, 0)] = 0;
  internal.push_back({Party::Alice, 0, {}, {}});
  while (!queue.empty()) {
    auto [side, m] = queue.front();
    queue.pop_front();
    int id = index[key(side, m)];
    std::vector<Message> outs(p.input_count(side));
    for (Input in = 0; in < outs.size(); ++in) outs[in] = p.reply(side, in, m);
    std::vector<Message> targets = outs;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    std::vector<std::uint32_t> table(outs.size());
    for (std::size_t in = 0; in < outs.size(); ++in) {
      table[in] = static_cast<std::uint32_t>(std::lower_bound(targets.begin(), targets.end(), outs[in]) - targets.begin());
    }
    for (Message t : targets) {
      if (p.is_halting(t)) continue;
      Party next = other(side);
      if (index.emplace(key(next, t), static_cast<int>(internal.size())).second) {
        internal.push_back({next, t, {}, {}});
        queue.emplace_back(next, t);
      }
    }
    internal[static_cast<std::size_t>(id)].targets = std::move(targets);
    internal[static_cast<std::size_t>(id)].table = std::move(table);
  }
  const int n = static_cast<int>(internal.size());
  bool uses[2] = {false, false};
  for (const auto& v : internal) {
    for (Message t : v.targets) {
      if (p.is_halting(t)) uses[p.halt_output(t)] = true;
    }
  }
  int sinkId[2] = {-1, -1};
  int next = n;
  for (int b = 0; b < 2; ++b) {
    if (uses[b]) sinkId[b] = next++;
  }
  std::vector<GbbpNode> nodes(static_cast<std::size_t>(next));
  for (int id = 0; id < n; ++id) {
    auto& src = internal[static_cast<std::size_t>(id)];
    auto& dst = nodes[static_cast<std::size_t>(id)];
    dst.kind = src.side == Party::Alice ? NodeKind::Alice : NodeKind::Bob;
    for (Message t : src.targets) {
      dst.succ.push_back(p.is_halting(t) ? sinkId[p.halt_output(t)] : index.at(key(other(src.side), t)));
    }
    dst.selector.table = std::move(src.table);
  }
  for (int b = 0; b < 2; ++b) {
    if (sinkId[b] >= 0) nodes[static_cast<std::size_t>(sinkId[b])].kind = b ? NodeKind::Sink1 : NodeKind::Sink0;
  }
  try {
    return Gbbp(p.nA(), p.nB(), 0, std::move(nodes));
  } catch (const Error& e) {
    throw Error(std::string("protocol transition graph is not a valid program (width ") + std::to_string(s) + "): " + e.what());
  }
}

Gbbp normalize_alternating(const Gbbp& g) {
  std::vector<GbbpNode> nodes = g.nodes();
  std::map<std::pair<int, int>, int> passThrough;  // (owner of pass node, target) -> id
  auto pass = [&](NodeKind owner, int target) {
    auto [it, inserted] = passThrough.emplace(std::make_pair(static_cast<int>(owner), target), static_cast<int>(nodes.size()));
    if (inserted) {
      GbbpNode v;
      v.kind = owner;
      v.succ = {target};
      v.selector = constant_selector(owner == NodeKind::Alice ? g.nA() : g.nB());
      nodes.push_back(std::move(v));
    }
    return it->second;
  };
  const int original = g.size();
  for (int id = 0; id < original; ++id) {
    NodeKind kind = nodes[static_cast<std::size_t>(id)].kind;
    if (is_sink(kind)) continue;
    for (std::size_t i = 0; i < nodes[static_cast<std::size_t>(id)].succ.size(); ++i) {
      int t = nodes[static_cast<std::size_t>(id)].succ[i];
      if (nodes[static_cast<std::size_t>(t)].kind == kind) {
        int via = pass(opposite(kind), t);
        nodes[static_cast<std::size_t>(id)].succ[i] = via;
      }
    }
  }
  int start = g.start();
  if (nodes[static_cast<std::size_t>(start)].kind == NodeKind::Bob) start = pass(NodeKind::Alice, start);
  return Gbbp(g.nA(), g.nB(), start, std::move(nodes));
}

NmProtocol gbbp_to_nm(const Gbbp& input) {
  if (is_sink(input.node(input.start()).kind)) {
    unsigned b = input.node(input.start()).kind == NodeKind::Sink1 ? 1 : 0;
    return NmProtocol(2, input.nA(), input.nB(), [b](Party side, Input, Message) -> Message {
      return side == Party::Alice ? 2 + b : 0;
    });
  }
  auto g = std::make_shared<Gbbp>(input.alternating() ? input : normalize_alternating(input));
  std::vector<int> code(static_cast<std::size_t>(g->size()), -1);
  auto ids = std::make_shared<std::array<std::vector<int>, 2>>();
  (*ids)[0].push_back(g->start());
  for (int id = 0; id < g->size(); ++id) {
    NodeKind k = g->node(id).kind;
    if (k == NodeKind::Alice && id != g->start()) (*ids)[0].push_back(id);
    if (k == NodeKind::Bob) (*ids)[1].push_back(id);
  }
  for (int side = 0; side < 2; ++side) {
    for (std::size_t c = 0; c < (*ids)[side].size(); ++c) code[static_cast<std::size_t>((*ids)[side][c])] = static_cast<int>(c);
  }
  const auto maxPart = std::max((*ids)[0].size(), (*ids)[1].size());
  const int s = std::max(2, ceil_log2(maxPart + 2));
  // Successor messages per node and out-edge.
  auto succCode = std::make_shared<std::vector<std::vector<Message>>>(static_cast<std::size_t>(g->size()));
  for (int id = 0; id < g->size(); ++id) {
    for (int t : g->node(id).succ) {
      NodeKind k = g->node(t).kind;
      Message m = k == NodeKind::Sink0 ? static_cast<Message>(pow2(s) - 2)
                  : k == NodeKind::Sink1 ? static_cast<Message>(pow2(s) - 1)
                                         : static_cast<Message>(code[static_cast<std::size_t>(t)]);
      (*succCode)[static_cast<std::size_t>(id)].push_back(m);
    }
  }
  return NmProtocol(s, g->nA(), g->nB(), [g, ids, succCode](Party side, Input in, Message m) -> Message {
    const auto& list = (*ids)[side == Party::Alice ? 0 : 1];
    if (m >= list.size()) return 0;
    int id = list[m];
    return (*succCode)[static_cast<std::size_t>(id)][g->node(id).selector(in)];
  });
}

Bbp gbbp_to_bbp(const Gbbp& g) {
  std::vector<GbbpNode> nodes = g.nodes();
  const int original = g.size();
  for (int id = 0; id < original; ++id) {
    GbbpNode v = nodes[static_cast<std::size_t>(id)];
    if (is_sink(v.kind) || v.succ.size() == 2) continue;
    if (v.succ.size() == 1) {
      nodes[static_cast<std::size_t>(id)].succ = {v.succ[0], v.succ[0]};
      continue;
    }
    const int bits = owner_bits(g, v.kind);
    auto sel = std::make_shared<Selector>(v.selector);
    // Node for the selector range [lo, hi) tests sel(in) >= mid.
    std::function<int(int, int, int)> build = [&](int lo, int hi, int reuse) -> int {
      if (hi - lo == 1) return v.succ[static_cast<std::size_t>(lo)];
      int mid = lo + (hi - lo) / 2;
      int id2 = reuse;
      if (id2 < 0) {
        id2 = static_cast<int>(nodes.size());
        nodes.emplace_back();
      }
      int left = build(lo, mid, -1);
      int right = build(mid, hi, -1);
      GbbpNode t;
      t.kind = v.kind;
      t.succ = {left, right};
      auto threshold = static_cast<std::uint32_t>(mid);
      if (bits <= kMaxSelectorTableBits) {
        t.selector.table.resize(pow2(bits));
        for (Input in = 0; in < pow2(bits); ++in) t.selector.table[in] = (*sel)(in) >= threshold ? 1 : 0;
      } else {
        t.selector.rule = [sel, threshold](Input in) { return (*sel)(in) >= threshold ? 1U : 0U; };
      }
      nodes[static_cast<std::size_t>(id2)] = std::move(t);
      return id2;
    };
    build(0, static_cast<int>(v.succ.size()), id);
  }
  return Gbbp(g.nA(), g.nB(), g.start(), std::move(nodes));
}

Gbbp build_parity_gbbp(int n) {
  if (n < 1 || n > 64) throw Error("PARITY program requires 1 <= n <= 64");
  auto sel = [n] {
    Selector s;
    if (n <= kMaxSelectorTableBits) {
      s.table.resize(pow2(n));
      for (Input in = 0; in < pow2(n); ++in) s.table[in] = parity(in);
    } else {
      s.rule = [](Input in) { return parity(in); };
    }
    return s;
  };
  std::vector<GbbpNode> nodes(5);
  nodes[0] = {NodeKind::Alice, {1, 2}, sel()};
  nodes[1] = {NodeKind::Bob, {3, 4}, sel()};
  nodes[2] = {NodeKind::Bob, {4, 3}, sel()};
  nodes[3].kind = NodeKind::Sink0;
  nodes[4].kind = NodeKind::Sink1;
  return Gbbp(n, n, 0, std::move(nodes));
}

namespace {

// Distinct rows and columns of a truth matrix; enough to decide realizability.
struct Reduced {
  std::vector<std::vector<std::uint8_t>> rows;  // rows[r][c]
  std::size_t cols = 0;
};

Reduced reduce(const SplitFunction& f) {
  std::vector<std::vector<std::uint8_t>> colVecs;
  std::map<std::vector<std::uint8_t>, int> colIndex;
  std::vector<int> colOf(f.cols());
  for (Input y = 0; y < f.cols(); ++y) {
    std::vector<std::uint8_t> c(f.rows());
    for (Input x = 0; x < f.rows(); ++x) c[x] = static_cast<std::uint8_t>(f.at(x, y));
    auto [it, inserted] = colIndex.emplace(c, static_cast<int>(colVecs.size()));
    if (inserted) colVecs.push_back(c);
    colOf[y] = it->second;
  }
  std::map<std::vector<std::uint8_t>, int> rowIndex;
  Reduced r;
  r.cols = colVecs.size();
  for (Input x = 0; x < f.rows(); ++x) {
    std::vector<std::uint8_t> row(r.cols);
    for (std::size_t c = 0; c < r.cols; ++c) row[c] = colVecs[c][x];
    if (rowIndex.emplace(row, static_cast<int>(r.rows.size())).second) r.rows.push_back(row);
  }
  return r;
}

struct Shape {
  std::vector<NodeKind> owner;           // internal nodes 0..m-1; node 0 is the start
  std::vector<std::vector<int>> succ;    // ids >= m denote sinks: m -> 0, m+1 -> 1
};

// Decides whether some choice of selectors makes the shape compute the reduced matrix.
bool realizable(const Shape& sh, const Reduced& f) {
  const int m = static_cast<int>(sh.owner.size());
  std::vector<int> slot(static_cast<std::size_t>(m));
  std::vector<int> degA;
  std::vector<int> degB;
  for (int i = 0; i < m; ++i) {
    auto& deg = sh.owner[static_cast<std::size_t>(i)] == NodeKind::Alice ? degA : degB;
    slot[static_cast<std::size_t>(i)] = static_cast<int>(deg.size());
    deg.push_back(static_cast<int>(sh.succ[static_cast<std::size_t>(i)].size()));
  }
  auto count = [](const std::vector<int>& deg) {
    std::size_t c = 1;
    for (int d : deg) c *= static_cast<std::size_t>(d);
    return c;
  };
  const std::size_t CA = count(degA);
  const std::size_t CB = count(degB);
  auto digits = [](std::size_t v, const std::vector<int>& deg) {
    std::vector<int> d(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i) {
      d[i] = static_cast<int>(v % static_cast<std::size_t>(deg[i]));
      v /= static_cast<std::size_t>(deg[i]);
    }
    return d;
  };
  std::vector<std::vector<int>> choiceA(CA);
  std::vector<std::vector<int>> choiceB(CB);
  for (std::size_t c = 0; c < CA; ++c) choiceA[c] = digits(c, degA);
  for (std::size_t d = 0; d < CB; ++d) choiceB[d] = digits(d, degB);
  const std::size_t words = (CA + 63) / 64;
  // mask[d][b]: Alice choice vectors c whose walk against d ends in sink b.
  std::vector<std::vector<std::uint64_t>> mask(CB * 2, std::vector<std::uint64_t>(words, 0));
  for (std::size_t d = 0; d < CB; ++d) {
    for (std::size_t c = 0; c < CA; ++c) {
      int u = 0;
      while (u < m) {
        bool alice = sh.owner[static_cast<std::size_t>(u)] == NodeKind::Alice;
        int pick = alice ? choiceA[c][static_cast<std::size_t>(slot[static_cast<std::size_t>(u)])]
                         : choiceB[d][static_cast<std::size_t>(slot[static_cast<std::size_t>(u)])];
        u = sh.succ[static_cast<std::size_t>(u)][static_cast<std::size_t>(pick)];
      }
      mask[d * 2 + static_cast<std::size_t>(u - m)][c / 64] |= std::uint64_t{1} << (c % 64);
    }
  }
  const std::size_t R = f.rows.size();
  std::vector<std::uint64_t> full(words, ~std::uint64_t{0});
  if (CA % 64) full[words - 1] = (std::uint64_t{1} << (CA % 64)) - 1;
  std::vector<std::vector<std::uint64_t>> cand(R * (f.cols + 1), full);
  std::function<bool(std::size_t)> solve = [&](std::size_t col) -> bool {
    if (col == f.cols) return true;
    for (std::size_t d = 0; d < CB; ++d) {
      bool ok = true;
      for (std::size_t r = 0; r < R && ok; ++r) {
        const auto& prev = cand[col * R + r];
        auto& next = cand[(col + 1) * R + r];
        const auto& mk = mask[d * 2 + f.rows[r][col]];
        bool any = false;
        for (std::size_t w = 0; w < words; ++w) {
          next[w] = prev[w] & mk[w];
          any = any || next[w] != 0;
        }
        ok = any;
      }
      if (ok && solve(col + 1)) return true;
    }
    return false;
  };
  return solve(0);
}

bool constant(const Reduced& f) { return f.rows.size() == 1 && f.cols == 1; }

// Enumerates shapes with m internal nodes in topological order.
bool search_shapes(const Reduced& f, int m, bool alternatingMode) {
  Shape sh;
  sh.owner.resize(static_cast<std::size_t>(m));
  sh.succ.resize(static_cast<std::size_t>(m));
  std::vector<int> referenced(static_cast<std::size_t>(m), 0);
  std::function<bool(int)> assign = [&](int i) -> bool {
    if (i < 0) return realizable(sh, f);
    // Node i picks successors among later nodes and the sinks.
    std::vector<int> options;
    for (int j = i + 1; j < m; ++j) {
      if (!alternatingMode || sh.owner[static_cast<std::size_t>(j)] != sh.owner[static_cast<std::size_t>(i)]) options.push_back(j);
    }
    options.push_back(m);
    options.push_back(m + 1);
    const auto k = options.size();
    for (std::uint32_t subset = 0; subset < (1U << k); ++subset) {
      int pc = __builtin_popcount(subset);
      if (pc < 2 || (!alternatingMode && pc != 2)) continue;
      auto& succ = sh.succ[static_cast<std::size_t>(i)];
      succ.clear();
      for (std::size_t b = 0; b < k; ++b) {
        if (subset & (1U << b)) succ.push_back(options[b]);
      }
      for (int t : succ) {
        if (t < m) ++referenced[static_cast<std::size_t>(t)];
      }
      // Later nodes were assigned first; node i+1.. must all be referenced once nodes < i+1 are placed.
      bool ok = true;
      if (i == 0) {
        for (int j = 1; j < m && ok; ++j) ok = referenced[static_cast<std::size_t>(j)] > 0;
      }
      if (ok && assign(i - 1)) return true;
      for (int t : succ) {
        if (t < m) --referenced[static_cast<std::size_t>(t)];
      }
    }
    return false;
  };
  for (std::uint32_t owners = 0; owners < (1U << m); ++owners) {
    for (int i = 0; i < m; ++i) sh.owner[static_cast<std::size_t>(i)] = (owners >> i) & 1U ? NodeKind::Bob : NodeKind::Alice;
    std::fill(referenced.begin(), referenced.end(), 0);
    if (assign(m - 1)) return true;
  }
  return false;
}

std::optional<int> min_size(const SplitFunction& f, int maxSize, bool alternatingMode) {
  if (f.rows() * f.cols() > 256) throw ScaleError("exhaustive program search requires at most 256 input pairs");
  if (maxSize > 6) throw ScaleError("exhaustive program search requires maxSize <= 6");
  Reduced r = reduce(f);
  if (constant(r)) return maxSize >= 1 ? std::optional<int>(1) : std::nullopt;
  for (int size = 3; size <= maxSize; ++size) {
    if (search_shapes(r, size - 2, alternatingMode)) return size;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> min_gbbp_size(const SplitFunction& f, int maxSize) { return min_size(f, maxSize, true); }

std::optional<int> min_bbp_size(const SplitFunction& f, int maxSize) { return min_size(f, maxSize, false); }

std::optional<int> min_nm_width(const SplitFunction& f, int maxWidth, std::uint64_t budget) {
  Reduced r = reduce(f);
  const std::size_t R = r.rows.size();
  const std::size_t C = r.cols;
  for (int s = 2; s <= maxWidth; ++s) {
    const std::uint64_t M = pow2(s);
    const std::uint64_t live = M - 2;
    // Options per input: a value for each non-halting message.
    long double options = 1;
    for (std::uint64_t i = 0; i < live; ++i) options *= static_cast<long double>(M);
    long double combos = 1;
    for (std::size_t i = 0; i < R; ++i) combos *= options;
    if (combos > static_cast<long double>(budget) || options * static_cast<long double>(C) > static_cast<long double>(budget)) {
      return std::nullopt;
    }
    const auto perInput = static_cast<std::uint64_t>(options);
    auto decode = [&](std::uint64_t v, std::vector<Message>& table) {
      for (std::uint64_t m = 0; m < live; ++m) {
        table[m] = static_cast<Message>(v % M);
        v /= M;
      }
    };
    auto run = [&](const std::vector<Message>& a, const std::vector<Message>& b) -> int {
      Message msg = a[0];
      bool aliceSent = true;
      for (std::uint64_t step = 0; step <= 2 * M + 1; ++step) {
        if (msg >= live) return static_cast<int>(msg - live);
        msg = aliceSent ? b[msg] : a[msg];
        aliceSent = !aliceSent;
      }
      return -1;
    };
    std::vector<std::vector<Message>> alice(R, std::vector<Message>(live));
    std::vector<std::uint64_t> digit(R, 0);
    std::vector<Message> bob(live);
    for (;;) {
      for (std::size_t i = 0; i < R; ++i) decode(digit[i], alice[i]);
      bool all = true;
      for (std::size_t c = 0; c < C && all; ++c) {
        bool found = false;
        for (std::uint64_t v = 0; v < perInput && !found; ++v) {
          decode(v, bob);
          bool ok = true;
          for (std::size_t i = 0; i < R && ok; ++i) ok = run(alice[i], bob) == r.rows[i][c];
          found = ok;
        }
        all = found;
      }
      if (all) return s;
      std::size_t i = 0;
      while (i < R && ++digit[i] == perInput) digit[i++] = 0;
      if (i == R) break;
    }
  }
  return std::nullopt;
}

std::string format_gbbp(const Gbbp& g) {
  std::string out = "k=" + std::to_string(g.k()) + " nodes=" + std::to_string(g.size()) + " na=" + std::to_string(g.nA()) +
                    " nb=" + std::to_string(g.nB()) + " start=" + std::to_string(g.start()) + "\n";
  for (int id = 0; id < g.size(); ++id) {
    const auto& v = g.node(id);
    out += "N " + std::to_string(id) + " " + kind_token(v.kind) + " " + std::to_string(v.succ.size());
    for (int t : v.succ) out += " " + std::to_string(t);
    out += "\n";
    if (is_sink(v.kind)) continue;
    int bits = owner_bits(g, v.kind);
    if (bits > 16) throw ScaleError("selector table too large to serialize");
    out += "T " + std::to_string(id);
    for (Input in = 0; in < pow2(bits); ++in) out += " " + std::to_string(v.selector(in));
    out += "\n";
  }
  return out;
}

Gbbp parse_gbbp(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int k = 0;
  int count = 0;
  int nA = 0;
  int nB = 0;
  int start = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "k=%d nodes=%d na=%d nb=%d start=%d%c", &k, &count, &nA, &nB, &start, &tail) != 5) {
    throw Error("malformed header: expected 'k=<int> nodes=<int> na=<int> nb=<int> start=<id>'");
  }
  if (count < 1 || count > (1 << 20) || nA < 1 || nB < 1 || nA > 16 || nB > 16) throw Error("header values out of range");
  std::vector<GbbpNode> nodes(static_cast<std::size_t>(count));
  std::vector<std::uint8_t> seenN(nodes.size(), 0);
  std::vector<std::uint8_t> seenT(nodes.size(), 0);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    int id = -1;
    ls >> tag >> id;
    if (id < 0 || id >= count) throw Error("node id out of range in '" + line + "'");
    auto& v = nodes[static_cast<std::size_t>(id)];
    if (tag == "N") {
      std::string kind;
      std::size_t deg = 0;
      ls >> kind >> deg;
      v.kind = kind == "A" ? NodeKind::Alice : kind == "B" ? NodeKind::Bob : kind == "S0" ? NodeKind::Sink0 : NodeKind::Sink1;
      if (kind != "A" && kind != "B" && kind != "S0" && kind != "S1") throw Error("unknown node kind '" + kind + "'");
      int t = 0;
      while (ls >> t) v.succ.push_back(t);
      if (v.succ.size() != deg) throw Error("out-degree mismatch at node " + std::to_string(id));
      seenN[static_cast<std::size_t>(id)] = 1;
    } else if (tag == "T") {
      if (!seenN[static_cast<std::size_t>(id)]) throw Error("T record precedes N record for node " + std::to_string(id));
      std::uint32_t e = 0;
      while (ls >> e) v.selector.table.push_back(e);
      seenT[static_cast<std::size_t>(id)] = 1;
    } else {
      throw Error("unknown record '" + tag + "'");
    }
  }
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!seenN[id]) throw Error("missing N record for node " + std::to_string(id));
    if (!is_sink(nodes[id].kind) && !seenT[id]) throw Error("missing T record for node " + std::to_string(id));
  }
  Gbbp g(nA, nB, start, std::move(nodes));
  if (g.k() > k) throw Error("header k is smaller than the largest out-degree");
  return g;
}

}  // namespace memoryless
