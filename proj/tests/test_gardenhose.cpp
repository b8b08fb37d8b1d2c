#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "memoryless/gardenhose.hpp"
#include "memoryless/m_protocol.hpp"

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

std::vector<int> matching(int pipes, std::initializer_list<std::pair<int, int>> hoses) {
  std::vector<int> mate(static_cast<std::size_t>(pipes) + 1, 0);
  for (auto [u, v] : hoses) {
    mate[static_cast<std::size_t>(u)] = v;
    mate[static_cast<std::size_t>(v)] = u;
  }
  return mate;
}

// Random perfect-or-partial matchings with the tap opening left free.
GhConfig random_config(int pipes, std::mt19937& rng) {
  std::vector<int> tap(2);
  std::vector<std::vector<int>> alice(2);
  std::vector<std::vector<int>> bob(2);
  for (int in = 0; in < 2; ++in) {
    for (int side = 0; side < 2; ++side) {
      std::vector<int> order;
      for (int i = 1; i <= pipes; ++i) order.push_back(i);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<int> mate(static_cast<std::size_t>(pipes) + 1, 0);
      std::size_t first = 0;
      if (side == 0) tap[static_cast<std::size_t>(in)] = order[first++];
      for (std::size_t i = first; i + 1 < order.size(); i += 2) {
        if (rng() % 4 == 0) continue;
        mate[static_cast<std::size_t>(order[i])] = order[i + 1];
        mate[static_cast<std::size_t>(order[i + 1])] = order[i];
      }
      (side == 0 ? alice : bob)[static_cast<std::size_t>(in)] = mate;
    }
  }
  return GhConfig(pipes, 1, 1, tap, alice, bob);
}

// EQ_1 with four pipes: x picks pipe 1 or 2, Bob routes his own pipe back to a spill-0 opening.
GhConfig eq1_config() {
  // x=0 taps pipe 1, x=1 taps pipe 2. Bob leaves pipe y+1 open and hoses the other into pipe 3 or 4.
  std::vector<int> tap = {1, 2};
  std::vector<std::vector<int>> alice = {matching(4, {}), matching(4, {})};
  std::vector<std::vector<int>> bob = {matching(4, {{2, 3}}), matching(4, {{1, 4}})};
  return GhConfig(4, 1, 1, tap, alice, bob);
}

}  // namespace

TEST(GardenHose, HandTraceTwoPipes) {
  GhConfig c(2, 1, 1, {1, 1}, {matching(2, {}), matching(2, {})}, {matching(2, {{1, 2}}), matching(2, {{1, 2}})});
  auto r = simulate_flow(c, 0, 0);
  std::vector<Opening> expected = {{Party::Alice, 1}, {Party::Bob, 1}, {Party::Bob, 2}, {Party::Alice, 2}};
  EXPECT_EQ(r.path, expected);
  EXPECT_EQ(r.spillSide, Party::Alice);
  EXPECT_EQ(r.output, 0U);
}

TEST(GardenHose, OneHopSpillsOnBob) {
  GhConfig c(1, 1, 1, {1, 1}, {matching(1, {}), matching(1, {})}, {matching(1, {}), matching(1, {})});
  auto r = simulate_flow(c, 1, 0);
  EXPECT_EQ(r.spillSide, Party::Bob);
  EXPECT_EQ(r.output, 1U);
  auto p = gh_to_nm(c);
  auto t = run_nm(p, 0, 1);
  EXPECT_EQ(t.output, 1U);
  EXPECT_LE(t.rounds, 2);
}

TEST(GardenHose, InvalidConfigsRejected) {
  // Asymmetric hose.
  std::vector<int> bad = {0, 2, 0};
  EXPECT_THROW(GhConfig(2, 1, 1, {1, 1}, {bad, matching(2, {})}, {matching(2, {}), matching(2, {})}), Error);
  // Tap on a hosed opening.
  EXPECT_THROW(GhConfig(2, 1, 1, {1, 1}, {matching(2, {{1, 2}}), matching(2, {})}, {matching(2, {}), matching(2, {})}), Error);
  // Tap out of range.
  EXPECT_THROW(GhConfig(2, 1, 1, {3, 1}, {matching(2, {}), matching(2, {})}, {matching(2, {}), matching(2, {})}), Error);
}

TEST(GardenHose, HandmadeEqConfig) {
  auto c = eq1_config();
  auto f = make_named_function("EQ", 1);
  EXPECT_TRUE(verify_gh(c, f).correct);
  auto p = gh_to_nm(c);
  EXPECT_LE(p.s(), ceil_log2(static_cast<std::uint64_t>(c.pipes())) + 1);
  EXPECT_TRUE(verify_protocol(p, f).correct);
  EXPECT_TRUE(compare_gh_nm(c, p).correct);
}

TEST(GardenHose, FlowIsSimpleOnRandomConfigs) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    int pipes = 1 + trial % 9;
    auto c = random_config(pipes, rng);
    for (Input x = 0; x < 2; ++x) {
      for (Input y = 0; y < 2; ++y) {
        auto r = simulate_flow(c, x, y);
        std::set<std::pair<int, int>> seen;
        for (const auto& o : r.path) ASSERT_TRUE(seen.insert({static_cast<int>(o.side), o.pipe}).second);
        ASSERT_EQ(r.path.back().side, r.spillSide);
        ASSERT_EQ(c.mate(r.spillSide, r.spillSide == Party::Alice ? x : y, r.path.back().pipe), 0);
      }
    }
    // The pipe-name protocol reproduces every flow.
    auto p = gh_to_nm(c);
    if (pipes >= 3) ASSERT_LE(p.s(), ceil_log2(static_cast<std::uint64_t>(pipes)) + 1);
    ASSERT_TRUE(compare_gh_nm(c, p).correct);
  }
}

TEST(GardenHose, NmToGhMatchesProtocols) {
  for (std::string name : kNames) {
    for (int n = 1; n <= 4; ++n) {
      auto p = build(name, n);
      auto c = nm_to_gh(p);
      EXPECT_LE(ceil_log2(static_cast<std::uint64_t>(c.pipes())), p.s() + 4) << name << " n=" << n;
      EXPECT_LE(static_cast<std::uint64_t>(c.pipes()), 4 * p.messages() + 4);
      EXPECT_TRUE(compare_gh_nm(c, p).correct) << name << " n=" << n;
      EXPECT_TRUE(verify_gh(c, make_named_function(name, n)).correct) << name << " n=" << n;
      auto back = gh_to_nm(c);
      EXPECT_LE(back.s(), std::max(2, ceil_log2(static_cast<std::uint64_t>(c.pipes())) + 1));
      EXPECT_TRUE(compare_protocols(p, back).correct) << name << " n=" << n;
    }
  }
}

TEST(GardenHose, NonHaltingProtocolRejected) {
  NmProtocol loop(2, 1, 1, [](Party, Input, Message) -> Message { return 0; });
  EXPECT_THROW(nm_to_gh(loop), Error);
}

TEST(GardenHose, IsaPipeline) {
  auto params = IsaParams::from_m(4);
  auto c = build_gh_isa(params);
  auto f = make_named_function("ISA", 4);
  EXPECT_TRUE(verify_gh(c, f).correct);
  EXPECT_TRUE(verify_protocol(build_isa_nm(params), f).correct);
  // Report the realized count against the 16n target.
  const double target = 16.0 * params.n();
  RecordProperty("pipes", c.pipes());
  RecordProperty("target", static_cast<int>(target));
  EXPECT_GT(c.pipes(), 0);
  // Locality: spill side ignores unselected blocks.
  for (Input a = 0; a < f.rows(); ++a) {
    int selected = static_cast<int>(a & 1U);
    for (Input b = 0; b < f.cols(); ++b) {
      for (int bit = 0; bit < params.nB(); ++bit) {
        if (bit / params.logm == selected) continue;
        Input flipped = b ^ (Input{1} << (params.nB() - 1 - bit));
        ASSERT_EQ(simulate_flow(c, a, b).spillSide, simulate_flow(c, a, flipped).spillSide);
      }
    }
  }
  EXPECT_TRUE(verify_gh(build_gh_isa(IsaParams::from_m(2)), make_named_function("ISA", 2)).correct);
}

TEST(GardenHose, QdisjPipeline) {
  auto c = build_gh_qdisj(2);
  auto f = make_named_function("QDISJ", 2);
  EXPECT_TRUE(verify_gh(c, f).correct);
  // Shared number spills on Alice's side.
  EXPECT_EQ(simulate_flow(c, 0b0110, 0b0011).output, 1U);
  EXPECT_EQ(simulate_flow(c, 0b0110, 0b1011).output, 0U);
  EXPECT_EQ(simulate_flow(c, 0b0110, 0b1011).spillSide, Party::Alice);
  EXPECT_TRUE(verify_gh(build_gh_qdisj(3, 2), make_qdisj(3, 2)).correct);
}

TEST(GardenHose, FormatRoundTrip) {
  auto c = nm_to_gh(build_eq(2));
  auto text = format_gh(c);
  auto d = parse_gh(text);
  EXPECT_EQ(format_gh(d), text);
  EXPECT_TRUE(verify_gh(d, make_named_function("EQ", 2)).correct);
  EXPECT_THROW(parse_gh("pipes=2 na=1 nb=1\nA 0 tap=1 1-2\n"), Error);
}
