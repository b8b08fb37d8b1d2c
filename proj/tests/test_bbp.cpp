#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "memoryless/bbp.hpp"
#include "memoryless/nm_protocol.hpp"

using namespace memoryless;

namespace {

NmProtocol build(const std::string& name, int n) {
  if (name == "EQ") return build_eq(n);
  if (name == "IP") return build_ip(n);
  if (name == "DISJ") return build_disj(n);
  if (name == "MAJ") return build_maj(n);
  return build_parity(n);
}

const char* const kNames[] = {"EQ", "IP", "DISJ", "MAJ", "PARITY"};

Selector table(std::vector<std::uint32_t> t) {
  Selector s;
  s.table = std::move(t);
  return s;
}

GbbpNode node(NodeKind kind, std::vector<int> succ, std::vector<std::uint32_t> sel) {
  return {kind, std::move(succ), table(std::move(sel))};
}

GbbpNode sink(unsigned b) { return {b ? NodeKind::Sink1 : NodeKind::Sink0, {}, {}}; }

SplitFunction from_bits(unsigned code) {
  SplitFunction f(1, 1);
  for (Input x = 0; x < 2; ++x) {
    for (Input y = 0; y < 2; ++y) f.set(x, y, (code >> (x * 2 + y)) & 1U);
  }
  return f;
}

// Independent reference: simulates the program from its raw node list.
unsigned walk(const Gbbp& g, Input x, Input y) {
  int id = g.start();
  for (int steps = 0; steps <= g.size(); ++steps) {
    const auto& v = g.node(id);
    if (v.kind == NodeKind::Sink0) return 0;
    if (v.kind == NodeKind::Sink1) return 1;
    id = v.succ[v.selector(v.kind == NodeKind::Alice ? x : y)];
  }
  ADD_FAILURE() << "walk did not reach a sink";
  return 2;
}

}  // namespace

TEST(Gbbp, ParityProgram) {
  auto g = build_parity_gbbp(2);
  EXPECT_EQ(g.size(), 5);
  EXPECT_EQ(eval_gbbp(g, 0b10, 0b01), 0U);
  EXPECT_TRUE(verify_gbbp(g, make_named_function("PARITY", 2)).correct);
  auto g8 = build_parity_gbbp(8);
  EXPECT_EQ(eval_gbbp(g8, 0b00000001, 0b10000000), 0U);
  EXPECT_TRUE(verify_gbbp(g8, make_named_function("PARITY", 8)).correct);
  auto g64 = build_parity_gbbp(64);
  EXPECT_EQ(g64.size(), 5);
  EXPECT_EQ(g64.eval(~Input{0}, 1), 1U);
}

TEST(Gbbp, ConstantProgram) {
  Gbbp g(1, 1, 0, {sink(1)});
  for (Input x = 0; x < 2; ++x) {
    for (Input y = 0; y < 2; ++y) EXPECT_EQ(g.eval(x, y), 1U);
  }
  auto p = gbbp_to_nm(g);
  auto r = verify_protocol(p, from_bits(0xF));
  EXPECT_TRUE(r.correct);
  EXPECT_EQ(r.worstRounds, 1);
}

TEST(Gbbp, ValidationRejectsMalformed) {
  // Cycle between two internal nodes.
  EXPECT_THROW(Gbbp(1, 1, 0, {node(NodeKind::Alice, {1, 2}, {0, 1}), node(NodeKind::Bob, {0, 3}, {0, 1}), sink(0), sink(1)}),
               Error);
  EXPECT_THROW(Gbbp(1, 1, 0, {node(NodeKind::Alice, {0, 1}, {0, 1}), sink(0)}), Error);
  EXPECT_THROW(Gbbp(1, 1, 0, {node(NodeKind::Alice, {1, 2}, {0}), sink(0), sink(1)}), Error);
  EXPECT_THROW(Gbbp(1, 1, 0, {node(NodeKind::Alice, {1, 2}, {0, 2}), sink(0), sink(1)}), Error);
  EXPECT_THROW(Gbbp(1, 1, 3, {sink(0)}), Error);
}

TEST(Gbbp, NmToGbbpMatchesProtocol) {
  for (std::string name : kNames) {
    for (int n = 1; n <= 6; ++n) {
      auto p = build(name, n);
      auto g = nm_to_gbbp(p);
      EXPECT_LE(static_cast<std::uint64_t>(g.size()), pow2(p.s() + 1)) << name << " n=" << n;
      for (Input x = 0; x < pow2(n); ++x) {
        for (Input y = 0; y < pow2(n); ++y) {
          auto t = run_nm(p, x, y);
          ASSERT_EQ(g.eval(x, y), t.output) << name << " n=" << n;
          ASSERT_EQ(walk(g, x, y), t.output);
        }
      }
    }
  }
  auto eq2 = nm_to_gbbp(build_eq(2));
  EXPECT_TRUE(verify_gbbp(eq2, make_named_function("EQ", 2)).correct);
  auto par = nm_to_gbbp(build_parity(8));
  EXPECT_LE(par.size(), 8);
  EXPECT_TRUE(verify_gbbp(par, make_named_function("PARITY", 8)).correct);
}

TEST(Gbbp, UnreachableStatesArePruned) {
  // Bob's replies never use message 1, so no node is built for it.
  NmProtocol p(2, 1, 1, [](Party side, Input in, Message m) -> Message {
    if (side == Party::Alice) return m == 0 ? 0 : 2 + static_cast<Message>(in);
    return 2 + static_cast<Message>(in);
  });
  auto g = nm_to_gbbp(p);
  EXPECT_LE(g.size(), 4);
  EXPECT_TRUE(verify_gbbp(g, from_bits(0b1010)).correct);
  for (Input x = 0; x < 2; ++x) {
    for (Input y = 0; y < 2; ++y) EXPECT_EQ(g.eval(x, y), run_nm(p, x, y).output);
  }
}

TEST(Gbbp, RoundTripThroughNm) {
  for (std::string name : kNames) {
    for (int n = 1; n <= 4; ++n) {
      auto p = build(name, n);
      auto g = nm_to_gbbp(p);
      auto q = gbbp_to_nm(g);
      int maxPart = std::max(g.part_size(NodeKind::Alice), g.part_size(NodeKind::Bob));
      if (g.alternating()) EXPECT_LE(q.s(), std::max(2, ceil_log2(static_cast<std::uint64_t>(maxPart) + 2)));
      EXPECT_TRUE(compare_protocols(p, q).correct) << name << " n=" << n;
    }
  }
  EXPECT_TRUE(verify_protocol(gbbp_to_nm(nm_to_gbbp(build_ip(2))), make_named_function("IP", 2)).correct);
}

TEST(Gbbp, ParityProgramToNarrowProtocol) {
  auto g = build_parity_gbbp(3);
  auto q = gbbp_to_nm(g);
  EXPECT_LE(q.s(), 3);
  EXPECT_TRUE(verify_protocol(q, make_named_function("PARITY", 3)).correct);
}

TEST(Gbbp, NonAlternatingIsNormalized) {
  // Alice -> Alice edge: node 0 tests x, node 1 tests x again, then Bob decides.
  Gbbp g(1, 1, 0,
         {node(NodeKind::Alice, {1, 2}, {0, 1}), node(NodeKind::Alice, {2, 3}, {1, 0}), node(NodeKind::Bob, {3, 4}, {0, 1}),
          sink(0), sink(1)});
  EXPECT_FALSE(g.alternating());
  auto h = normalize_alternating(g);
  EXPECT_TRUE(h.alternating());
  EXPECT_LE(h.size(), 2 * g.size());
  auto q = gbbp_to_nm(g);
  for (Input x = 0; x < 2; ++x) {
    for (Input y = 0; y < 2; ++y) {
      EXPECT_EQ(h.eval(x, y), g.eval(x, y));
      EXPECT_EQ(run_nm(q, x, y).output, g.eval(x, y));
    }
  }
}

TEST(Bbp, BinaryInputIsUnchanged) {
  auto g = build_parity_gbbp(2);
  auto b = gbbp_to_bbp(g);
  EXPECT_EQ(b.size(), g.size());
  EXPECT_TRUE(b.binary());
}

TEST(Bbp, DegreeFourNodeBecomesThreeNodes) {
  Gbbp g(2, 1, 0,
         {node(NodeKind::Alice, {1, 2, 3, 4}, {0, 1, 2, 3}), node(NodeKind::Bob, {3, 4}, {0, 1}), node(NodeKind::Bob, {4, 3}, {0, 1}),
          sink(0), sink(1)});
  auto b = gbbp_to_bbp(g);
  EXPECT_TRUE(b.binary());
  EXPECT_EQ(b.size(), g.size() + 2);
  EXPECT_LE(b.size(), g.size() * g.size());
  for (Input x = 0; x < 4; ++x) {
    for (Input y = 0; y < 2; ++y) ASSERT_EQ(b.eval(x, y), g.eval(x, y));
  }
}

TEST(Bbp, FromProtocolsIsEquivalent) {
  for (std::string name : kNames) {
    for (int n = 1; n <= 4; ++n) {
      auto g = nm_to_gbbp(build(name, n));
      auto b = gbbp_to_bbp(g);
      EXPECT_TRUE(b.binary());
      EXPECT_LE(b.size(), g.size() * g.size());
      EXPECT_TRUE(verify_gbbp(b, make_named_function(name, n)).correct) << name << " n=" << n;
    }
  }
}

TEST(Bp, ConvertsToGbbp) {
  // x_1 AND y_1 over one bit each.
  Bp bp{1, 1, 0, {{NodeKind::Alice, 0, 2, 1}, {NodeKind::Bob, 1, 2, 3}, {NodeKind::Sink0, 0, -1, -1}, {NodeKind::Sink1, 0, -1, -1}}};
  auto g = bp.to_gbbp();
  for (Input x = 0; x < 2; ++x) {
    for (Input y = 0; y < 2; ++y) {
      EXPECT_EQ(bp.eval(x, y), x & y);
      EXPECT_EQ(g.eval(x, y), x & y);
    }
  }
}

TEST(Gbbp, FormatRoundTrip) {
  for (std::string name : kNames) {
    auto g = nm_to_gbbp(build(name, 3));
    auto text = format_gbbp(g);
    auto h = parse_gbbp(text);
    EXPECT_EQ(format_gbbp(h), text);
    EXPECT_TRUE(verify_gbbp(h, make_named_function(name, 3)).correct);
  }
  EXPECT_THROW(parse_gbbp("k=2 nodes=1 na=1 nb=1 start=0\n"), Error);
  EXPECT_THROW(parse_gbbp("k=2 nodes=1 na=1 nb=1 start=0\nN 0 Q 0\n"), Error);
}

TEST(MinSearch, SmallKnownValues) {
  EXPECT_EQ(min_gbbp_size(SplitFunction(1, 1), 6), 1);
  EXPECT_EQ(min_gbbp_size(from_bits(0b1100), 6), 3);  // F = x_1
  EXPECT_EQ(min_gbbp_size(from_bits(0b1010), 6), 3);  // F = y_1
  auto eq1 = min_gbbp_size(make_named_function("EQ", 1), 6);
  ASSERT_TRUE(eq1.has_value());
  EXPECT_EQ(*eq1, 5);
  EXPECT_THROW(min_gbbp_size(make_named_function("EQ", 5), 6), ScaleError);
  EXPECT_THROW(min_gbbp_size(SplitFunction(1, 1), 7), ScaleError);
}

TEST(MinSearch, AllTwoByTwoFunctionsAgreeWithWidthSearch) {
  for (unsigned code = 0; code < 16; ++code) {
    auto f = from_bits(code);
    auto g = min_gbbp_size(f, 6);
    auto b = min_bbp_size(f, 6);
    auto w = min_nm_width(f, 3);
    ASSERT_TRUE(g && b && w) << code;
    EXPECT_LE(*g, *b);
    // Sandwich: half log BBP <= ceil log GBBP.
    EXPECT_LE(0.5 * std::log2(*b), ceil_log2(static_cast<std::uint64_t>(*g)) + 1e-9);
    int lg = ceil_log2(static_cast<std::uint64_t>(*g));
    // NM widths start at 2, so constants (log size 0) are compared against 1.
    EXPECT_LE(lg, *w + 1) << code;
    EXPECT_LE(*w, std::max(lg, 1) + 1) << code;
  }
}

TEST(MinSearch, TwoBitFunctions) {
  auto and2 = min_gbbp_size(make_named_function("DISJ", 2), 6);
  auto par2 = min_gbbp_size(make_named_function("PARITY", 2), 6);
  ASSERT_TRUE(par2.has_value());
  EXPECT_EQ(*par2, 5);
  if (and2) EXPECT_GE(*and2, 5);
}
