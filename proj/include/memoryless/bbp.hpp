#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/nm_protocol.hpp"
#include "memoryless/verify.hpp"

namespace memoryless {

enum class NodeKind : std::uint8_t { Alice, Bob, Sink0, Sink1 };

inline bool is_sink(NodeKind k) { return k == NodeKind::Sink0 || k == NodeKind::Sink1; }

/// Maps the owner's input to an out-edge index. Tabulated when the input space is small.
struct Selector {
  std::vector<std::uint32_t> table;
  std::function<std::uint32_t(Input)> rule;

  std::uint32_t operator()(Input in) const { return rule ? rule(in) : table[in]; }
};

struct GbbpNode {
  NodeKind kind = NodeKind::Sink0;
  std::vector<int> succ;
  Selector selector;
};

/// Generalized bipartite branching program. Sinks count toward the size.
class Gbbp {
 public:
  Gbbp(int nA, int nB, int start, std::vector<GbbpNode> nodes);

  int nA() const { return nA_; }
  int nB() const { return nB_; }
  int start() const { return start_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int k() const;
  const std::vector<GbbpNode>& nodes() const { return nodes_; }
  const GbbpNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  /// Non-sink nodes owned by each side.
  int part_size(NodeKind owner) const;
  bool alternating() const;
  bool binary() const;

  unsigned eval(Input x, Input y) const;

 private:
  int nA_;
  int nB_;
  int start_;
  std::vector<GbbpNode> nodes_;
};

/// Out-degree exactly 2 everywhere except sinks.
using Bbp = Gbbp;

/// Standard branching program over the concatenated input x||y; node i reads one variable.
struct BpNode {
  NodeKind kind = NodeKind::Sink0;  // Alice/Bob here only marks an internal node
  int var = 0;                      // index into x||y, 0-based
  int succ0 = -1;
  int succ1 = -1;
};

struct Bp {
  int nA = 0;
  int nB = 0;
  int start = 0;
  std::vector<BpNode> nodes;

  unsigned eval(Input x, Input y) const;
  Gbbp to_gbbp() const;
};

unsigned eval_gbbp(const Gbbp& g, Input x, Input y);
VerifyReport verify_gbbp(const Gbbp& g, const SplitFunction& f, int jobs = 0);

/// One node per reachable (side, received message); halting messages glued into the sinks.
Gbbp nm_to_gbbp(const NmProtocol& p);

/// Messages name the node the receiver acts at. Non-alternating programs get pass-through nodes first.
NmProtocol gbbp_to_nm(const Gbbp& g);

/// Inserts opposite-side pass-through nodes until every edge crosses sides and Alice owns the start.
Gbbp normalize_alternating(const Gbbp& g);

/// Replaces each out-degree-k node by a balanced binary tree of k-1 nodes of the same owner.
Bbp gbbp_to_bbp(const Gbbp& g);

Gbbp build_parity_gbbp(int n);

/// Exhaustive minimum over alternating programs with at most maxSize nodes.
std::optional<int> min_gbbp_size(const SplitFunction& f, int maxSize);

/// Exhaustive minimum over out-degree-2 programs with at most maxSize nodes.
std::optional<int> min_bbp_size(const SplitFunction& f, int maxSize);

/// Smallest s <= maxWidth admitting a correct NM protocol, by exhaustive table search.
/// Returns nullopt when the search space of some width exceeds `budget` Alice table combinations.
std::optional<int> min_nm_width(const SplitFunction& f, int maxWidth, std::uint64_t budget = std::uint64_t{1} << 20);

std::string format_gbbp(const Gbbp& g);
Gbbp parse_gbbp(std::string_view text);

}  // namespace memoryless
