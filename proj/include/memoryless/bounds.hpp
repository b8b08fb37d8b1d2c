#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memoryless/boolfn.hpp"
#include "memoryless/m_protocol.hpp"

namespace memoryless {

/// ceil(log2(distinct rows)).
int one_way_cc(const SplitFunction& f);
std::uint64_t distinct_rows(const SplitFunction& f);

/// log2(D / log2 D) for the one-way cost D in bits; 0 when D < 2.
double nm_lower_bound_from(std::uint64_t dOneWay);
double nm_lower_bound(const SplitFunction& f);

/// Minimum protocol-tree depth; monochromatic rectangles cost 0. nullopt beyond 16x16 or the work budget.
std::optional<int> exact_cc(const SplitFunction& f, std::uint64_t budget = 50'000'000);

/// n - log2 n - 1.
double counting_bound(int n);

struct Rectangle {
  std::vector<Input> rows;
  std::vector<Input> cols;
  unsigned label = 0;
};

using Overlay = std::vector<Rectangle>;

struct OverlayCheck {
  bool ok = true;
  Input x = 0;
  Input y = 0;
  std::string condition;  // "coverage" or "first-hit"
};

/// Coverage, then label agreement on the cells each rectangle decides (monochromatic where visible).
OverlayCheck verify_overlay(const Overlay& o, const SplitFunction& f);

/// Alice lists the rectangles containing her row; Bob answers a rectangle's label when his column is in it.
MOneWayProtocol overlay_to_m_oneway(const Overlay& o, const SplitFunction& f);

std::string format_overlay(const Overlay& o, int nA, int nB);
Overlay parse_overlay(std::string_view text, int* nA = nullptr, int* nB = nullptr);

struct BoundsReport {
  int dOneWay = 0;
  std::uint64_t distinctRows = 0;
  std::optional<int> dExact;
  std::string dExactReason;
  double countingBound = 0;
  int countingN = 0;
  double nmLower = 0;
  std::optional<int> minGbbp;
  std::optional<int> minGbbpLog;
  std::string minGbbpReason;
  bool consistent = true;
  std::vector<std::string> notes;

  /// D / k when the exact value is known.
  std::optional<double> nmRoundLower(int k) const;
};

/// maxExact bounds nA and nB for the exact oracles (default 4 for D, 2 for min-GBBP).
BoundsReport bounds_report(const SplitFunction& f, int maxExact = 4);

std::string format_report(const BoundsReport& r);

}  // namespace memoryless
