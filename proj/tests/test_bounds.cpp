#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "memoryless/bbp.hpp"
#include "memoryless/bounds.hpp"
#include "memoryless/gardenhose.hpp"

using namespace memoryless;

namespace {

// Plain recursion over explicit row/column lists; no dedup, no pruning.
int naive_cc(const SplitFunction& f, const std::vector<Input>& rows, const std::vector<Input>& cols,
             std::map<std::pair<std::vector<Input>, std::vector<Input>>, int>& memo) {
  auto key = std::make_pair(rows, cols);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::set<unsigned> seen;
  for (Input x : rows) {
    for (Input y : cols) seen.insert(f.at(x, y));
  }
  if (seen.size() <= 1) return memo[key] = 0;
  int best = 1 << 20;
  auto split = [&](const std::vector<Input>& set, bool byRows) {
    const std::size_t k = set.size();
    for (std::uint64_t mask = 1; mask + 1 < pow2(static_cast<int>(k)); ++mask) {
      std::vector<Input> a;
      std::vector<Input> b;
      for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1U ? a : b).push_back(set[i]);
      int cost = byRows ? 1 + std::max(naive_cc(f, a, cols, memo), naive_cc(f, b, cols, memo))
                        : 1 + std::max(naive_cc(f, rows, a, memo), naive_cc(f, rows, b, memo));
      best = std::min(best, cost);
    }
  };
  split(rows, true);
  split(cols, false);
  return memo[key] = best;
}

int naive_cc(const SplitFunction& f) {
  std::vector<Input> rows(f.rows());
  std::vector<Input> cols(f.cols());
  for (Input i = 0; i < f.rows(); ++i) rows[i] = i;
  for (Input i = 0; i < f.cols(); ++i) cols[i] = i;
  std::map<std::pair<std::vector<Input>, std::vector<Input>>, int> memo;
  return naive_cc(f, rows, cols, memo);
}

Overlay eq1_overlay() { return {{{0}, {0}, 1}, {{1}, {1}, 1}, {{0, 1}, {0, 1}, 0}}; }

}  // namespace

TEST(Bounds, OneWayCost) {
  EXPECT_EQ(one_way_cc(SplitFunction(3, 3)), 0);
  EXPECT_EQ(one_way_cc(make_named_function("EQ", 2)), 2);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(one_way_cc(make_named_function("EQ", n)), n);
  EXPECT_EQ(one_way_cc(make_named_function("PARITY", 6)), 1);
}

TEST(Bounds, NmLowerBoundFormula) {
  EXPECT_NEAR(nm_lower_bound_from(8), std::log2(8.0 / 3.0), 1e-12);
  EXPECT_NEAR(nm_lower_bound_from(8), 1.415, 1e-3);
  EXPECT_DOUBLE_EQ(nm_lower_bound_from(2), 1.0);
  EXPECT_DOUBLE_EQ(nm_lower_bound_from(1), 0.0);
  EXPECT_DOUBLE_EQ(nm_lower_bound(make_named_function("EQ", 4)), 1.0);
  EXPECT_DOUBLE_EQ(nm_lower_bound(SplitFunction(2, 2)), 0.0);
}

TEST(Bounds, CountingBound) {
  EXPECT_DOUBLE_EQ(counting_bound(8), 4.0);
  EXPECT_DOUBLE_EQ(counting_bound(2), 0.0);
  EXPECT_DOUBLE_EQ(counting_bound(16), 11.0);
}

TEST(Bounds, ExactCcKnownValues) {
  EXPECT_EQ(exact_cc(SplitFunction(2, 2)), 0);
  EXPECT_EQ(exact_cc(make_named_function("EQ", 1)), 2);
  EXPECT_EQ(exact_cc(make_named_function("EQ", 2)), 3);
  EXPECT_FALSE(exact_cc(make_named_function("EQ", 5)).has_value());
  EXPECT_FALSE(exact_cc(make_named_function("EQ", 3), 10).has_value());
}

TEST(Bounds, ExactCcMatchesNaiveOracle) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    int nA = 1 + trial % 2;
    int nB = 1 + (trial / 2) % 2;
    SplitFunction f(nA, nB);
    for (Input x = 0; x < f.rows(); ++x) {
      for (Input y = 0; y < f.cols(); ++y) f.set(x, y, rng() & 1U);
    }
    ASSERT_EQ(exact_cc(f), naive_cc(f)) << trial;
  }
  for (std::string name : {"EQ", "IP", "DISJ", "MAJ", "PARITY"}) {
    auto f = make_named_function(name, 2);
    EXPECT_EQ(exact_cc(f), naive_cc(f)) << name;
  }
}

TEST(Bounds, ExactCcSandwich) {
  for (std::string name : {"EQ", "IP", "DISJ", "MAJ", "PARITY", "PDIST_TOTAL"}) {
    for (int n = 1; n <= 3; ++n) {
      auto f = make_named_function(name, n);
      auto d = exact_cc(f);
      ASSERT_TRUE(d.has_value()) << name << n;
      int oneWay = one_way_cc(f);
      EXPECT_LE(*d, oneWay + 1);
      EXPECT_GE(pow2(*d), static_cast<std::uint64_t>(oneWay));
    }
  }
}

TEST(Overlay, EqOneAcceptedAndReorderedRejected) {
  auto f = make_named_function("EQ", 1);
  EXPECT_TRUE(verify_overlay(eq1_overlay(), f).ok);
  Overlay swapped = {{{0, 1}, {0, 1}, 0}, {{0}, {0}, 1}, {{1}, {1}, 1}};
  auto r = verify_overlay(swapped, f);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.condition, "first-hit");
  EXPECT_EQ(f.at(r.x, r.y), 1U);
}

TEST(Overlay, ConstantAndCoverage) {
  SplitFunction zero(1, 1);
  EXPECT_TRUE(verify_overlay({{{0, 1}, {0, 1}, 0}}, zero).ok);
  auto r = verify_overlay({{{0}, {0, 1}, 0}}, zero);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.condition, "coverage");
  EXPECT_EQ(r.x, 1U);
  auto mixed = verify_overlay({{{0, 1}, {0, 1}, 1}}, make_named_function("EQ", 1));
  EXPECT_FALSE(mixed.ok);
  EXPECT_EQ(mixed.condition, "first-hit");
  EXPECT_THROW(verify_overlay({{{2}, {0}, 0}}, zero), Error);
}

TEST(Overlay, CompilesToOneWayProtocol) {
  auto f = make_named_function("EQ", 1);
  auto p = overlay_to_m_oneway(eq1_overlay(), f);
  EXPECT_EQ(p.t, 2);
  EXPECT_LE(p.t, ceil_log2(3) + 1);
  EXPECT_TRUE(verify_m_oneway(p, f).correct);
  EXPECT_EQ(p.schedule[0], (std::vector<Message>{0, 2}));
  SplitFunction zero(1, 1);
  auto single = overlay_to_m_oneway({{{0, 1}, {0, 1}, 0}}, zero);
  EXPECT_EQ(single.schedule[0].size(), 1U);
  EXPECT_TRUE(verify_m_oneway(single, zero).correct);
  Overlay swapped = {{{0, 1}, {0, 1}, 0}, {{0}, {0}, 1}, {{1}, {1}, 1}};
  EXPECT_THROW(overlay_to_m_oneway(swapped, f), Error);
}

TEST(Overlay, FullPipelineToGardenHose) {
  auto f = make_named_function("EQ", 1);
  auto nm = m_oneway_to_nm(overlay_to_m_oneway(eq1_overlay(), f));
  EXPECT_TRUE(verify_protocol(nm, f).correct);
  auto c = nm_to_gh(nm);
  EXPECT_TRUE(verify_gh(c, f).correct);
}

TEST(Overlay, FormatRoundTrip) {
  int nA = 0;
  int nB = 0;
  auto text = format_overlay(eq1_overlay(), 1, 1);
  auto o = parse_overlay(text, &nA, &nB);
  EXPECT_EQ(nA, 1);
  EXPECT_EQ(nB, 1);
  EXPECT_EQ(format_overlay(o, 1, 1), text);
  EXPECT_THROW(parse_overlay("count=2 na=1 nb=1\nR 0 rows=0 cols=0\n"), Error);
  EXPECT_THROW(parse_overlay("count=1 na=1 nb=1\nR 0 rows=5 cols=0\n"), Error);
}

TEST(Report, EqFour) {
  auto r = bounds_report(make_named_function("EQ", 4));
  EXPECT_EQ(r.dOneWay, 4);
  EXPECT_DOUBLE_EQ(r.nmLower, 1.0);
  EXPECT_FALSE(r.minGbbpLog.has_value());
  EXPECT_FALSE(r.minGbbpReason.empty());
  EXPECT_TRUE(r.consistent);
  EXPECT_NE(format_report(r).find("dOneWay=4"), std::string::npos);
}

TEST(Report, ConstantFunction) {
  auto r = bounds_report(SplitFunction(2, 2));
  EXPECT_EQ(r.dOneWay, 0);
  EXPECT_DOUBLE_EQ(r.nmLower, 0.0);
  EXPECT_EQ(r.dExact, 0);
  EXPECT_EQ(r.minGbbp, 1);
  EXPECT_EQ(r.minGbbpLog, 0);
  EXPECT_TRUE(r.consistent);
}

TEST(Report, InnerProductTwo) {
  auto f = make_named_function("IP", 2);
  auto r = bounds_report(f);
  EXPECT_EQ(r.dOneWay, 2);
  EXPECT_GE(build_ip(2).s(), static_cast<int>(std::ceil(r.nmLower)));
  ASSERT_TRUE(r.minGbbpLog.has_value());
  EXPECT_LE(static_cast<int>(std::ceil(r.nmLower)), *r.minGbbpLog);
  EXPECT_TRUE(r.consistent);
  ASSERT_TRUE(r.nmRoundLower(1).has_value());
  EXPECT_DOUBLE_EQ(*r.nmRoundLower(2), *r.dExact / 2.0);
}

TEST(Report, WideInputsMarkedUnavailable) {
  auto r = bounds_report(make_named_function("EQ", 6));
  EXPECT_FALSE(r.dExact.has_value());
  EXPECT_FALSE(r.dExactReason.empty());
  EXPECT_NE(format_report(r).find("Unavailable"), std::string::npos);
  auto s = bounds_report(make_named_function("EQ", 3), 2);
  EXPECT_FALSE(s.dExact.has_value());
}
