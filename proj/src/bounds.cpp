#include "memoryless/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "memoryless/bbp.hpp"

namespace memoryless {

std::uint64_t distinct_rows(const SplitFunction& f) {
  std::set<std::vector<std::uint8_t>> rows;
  for (Input x = 0; x < f.rows(); ++x) {
    auto begin = f.table().begin() + static_cast<std::ptrdiff_t>(x * f.cols());
    rows.emplace(begin, begin + static_cast<std::ptrdiff_t>(f.cols()));
  }
  return rows.size();
}

int one_way_cc(const SplitFunction& f) { return ceil_log2(distinct_rows(f)); }

double nm_lower_bound_from(std::uint64_t d) {
  if (d < 2) return 0;
  auto dd = static_cast<double>(d);
  return std::log2(dd / std::log2(dd));
}

double nm_lower_bound(const SplitFunction& f) { return nm_lower_bound_from(static_cast<std::uint64_t>(one_way_cc(f))); }

double counting_bound(int n) {
  if (n < 1) throw Error("counting bound requires n >= 1");
  return n - std::log2(static_cast<double>(n)) - 1;
}

namespace {

struct BudgetExceeded {};

// Rectangles are (row mask, column mask) over at most 16 rows and 16 columns.
class ExactSolver {
 public:
  ExactSolver(const SplitFunction& f, std::uint64_t budget) : budget_(budget) {
    rows_ = static_cast<int>(f.rows());
    cols_ = static_cast<int>(f.cols());
    ones_.assign(static_cast<std::size_t>(rows_), 0);
    for (int x = 0; x < rows_; ++x) {
      for (int y = 0; y < cols_; ++y) {
        if (f.at(static_cast<Input>(x), static_cast<Input>(y))) ones_[static_cast<std::size_t>(x)] |= 1U << y;
      }
    }
  }

  int solve_full() { return solve(mask(rows_), mask(cols_), 64); }

 private:
  static std::uint32_t mask(int n) { return n >= 32 ? ~0U : (1U << n) - 1; }

  bool monochromatic(std::uint32_t rm, std::uint32_t cm) const {
    bool seen0 = false;
    bool seen1 = false;
    for (std::uint32_t r = rm; r; r &= r - 1) {
      std::uint32_t v = ones_[static_cast<std::size_t>(__builtin_ctz(r))] & cm;
      seen1 = seen1 || v != 0;
      seen0 = seen0 || v != cm;
      if (seen0 && seen1) return false;
    }
    return true;
  }

  // Drops rows (and columns) that repeat an earlier one inside the rectangle.
  void reduce(std::uint32_t& rm, std::uint32_t& cm) const {
    std::uint32_t keep = 0;
    std::vector<std::uint32_t> seen;
    for (std::uint32_t r = rm; r; r &= r - 1) {
      int x = __builtin_ctz(r);
      std::uint32_t v = ones_[static_cast<std::size_t>(x)] & cm;
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
        seen.push_back(v);
        keep |= 1U << x;
      }
    }
    rm = keep;
    keep = 0;
    seen.clear();
    for (std::uint32_t c = cm; c; c &= c - 1) {
      int y = __builtin_ctz(c);
      std::uint32_t v = 0;
      for (std::uint32_t r = rm; r; r &= r - 1) {
        int x = __builtin_ctz(r);
        if (ones_[static_cast<std::size_t>(x)] >> y & 1U) v |= 1U << x;
      }
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
        seen.push_back(v);
        keep |= 1U << y;
      }
    }
    cm = keep;
  }

  // Returns the exact depth if it is <= limit, otherwise any value > limit.
  int solve(std::uint32_t rm, std::uint32_t cm, int limit) {
    if (++work_ > budget_) throw BudgetExceeded{};
    if (monochromatic(rm, cm)) return 0;
    if (limit <= 0) return 1;
    reduce(rm, cm);
    std::uint64_t key = (static_cast<std::uint64_t>(rm) << 32) | cm;
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      auto [value, exact] = it->second;
      if (exact || value > limit) return value;
    }
    int best = limit + 1;
    for (int side = 0; side < 2 && best > 1; ++side) {
      std::uint32_t set = side == 0 ? rm : cm;
      if (__builtin_popcount(set) < 2) continue;
      std::uint32_t low = set & (~set + 1);
      std::uint32_t rest = set & ~low;
      // Subsets containing the lowest element, excluding the whole set.
      for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
        std::uint32_t part = sub | low;
        if (part != set) {
          std::uint32_t other = set & ~part;
          int cap = best - 2;
          int a = side == 0 ? solve(part, cm, cap) : solve(rm, part, cap);
          if (a <= cap) {
            int b = side == 0 ? solve(other, cm, cap) : solve(rm, other, cap);
            int cost = 1 + std::max(a, b);
            if (cost < best) best = cost;
          }
        }
        if (sub == 0 || best <= 1) break;
      }
    }
    memo_[key] = {best, best <= limit};
    return best;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint32_t> ones_;
  std::unordered_map<std::uint64_t, std::pair<int, bool>> memo_;
  std::uint64_t work_ = 0;
  std::uint64_t budget_;
};

bool contains(const std::vector<Input>& v, Input e) { return std::binary_search(v.begin(), v.end(), e); }

}  // namespace

std::optional<int> exact_cc(const SplitFunction& f, std::uint64_t budget) {
  if (f.rows() > 16 || f.cols() > 16) return std::nullopt;
  try {
    ExactSolver solver(f, budget);
    return solver.solve_full();
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

OverlayCheck verify_overlay(const Overlay& o, const SplitFunction& f) {
  std::vector<Rectangle> sorted = o;
  for (auto& r : sorted) {
    std::sort(r.rows.begin(), r.rows.end());
    std::sort(r.cols.begin(), r.cols.end());
    for (Input x : r.rows) {
      if (x >= f.rows()) throw Error("rectangle row out of range");
    }
    for (Input y : r.cols) {
      if (y >= f.cols()) throw Error("rectangle column out of range");
    }
  }
  // Owner of each cell: the first rectangle containing it.
  std::vector<int> first(f.rows() * f.cols(), -1);
  for (Input x = 0; x < f.rows(); ++x) {
    for (Input y = 0; y < f.cols(); ++y) {
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (contains(sorted[i].rows, x) && contains(sorted[i].cols, y)) {
          first[x * f.cols() + y] = static_cast<int>(i);
          break;
        }
      }
      if (first[x * f.cols() + y] < 0) return {false, x, y, "coverage"};
    }
  }
  // A rectangle only has to agree with f on the cells it decides.
  for (Input x = 0; x < f.rows(); ++x) {
    for (Input y = 0; y < f.cols(); ++y) {
      if (sorted[static_cast<std::size_t>(first[x * f.cols() + y])].label != f.at(x, y)) return {false, x, y, "first-hit"};
    }
  }
  return {};
}

MOneWayProtocol overlay_to_m_oneway(const Overlay& o, const SplitFunction& f) {
  OverlayCheck check = verify_overlay(o, f);
  if (!check.ok) throw Error("overlay fails " + check.condition + " at x=" + to_bits(check.x, f.nA()) + " y=" + to_bits(check.y, f.nB()));
  MOneWayProtocol p;
  p.t = std::max(1, ceil_log2(o.size()));
  p.nA = f.nA();
  p.nB = f.nB();
  p.schedule.resize(f.rows());
  for (Input x = 0; x < f.rows(); ++x) {
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (std::find(o[i].rows.begin(), o[i].rows.end(), x) != o[i].rows.end()) p.schedule[x].push_back(static_cast<Message>(i));
    }
  }
  p.bobMap.assign(f.cols() << p.t, BobOut::Continue);
  for (Input y = 0; y < f.cols(); ++y) {
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (std::find(o[i].cols.begin(), o[i].cols.end(), y) != o[i].cols.end()) {
        p.bobMap[(y << p.t) | i] = static_cast<BobOut>(o[i].label);
      }
    }
  }
  return p;
}

std::string format_overlay(const Overlay& o, int nA, int nB) {
  std::string out = "count=" + std::to_string(o.size()) + " na=" + std::to_string(nA) + " nb=" + std::to_string(nB) + "\n";
  auto list = [](const std::vector<Input>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  for (const auto& r : o) out += "R " + std::to_string(r.label) + " rows=" + list(r.rows) + " cols=" + list(r.cols) + "\n";
  return out;
}

Overlay parse_overlay(std::string_view text, int* nAOut, int* nBOut) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error("malformed header: empty file");
  int count = 0;
  int nA = 0;
  int nB = 0;
  char tail = 0;
  if (std::sscanf(line.c_str(), "count=%d na=%d nb=%d%c", &count, &nA, &nB, &tail) != 3) {
    throw Error("malformed header: expected 'count=<int> na=<int> nb=<int>'");
  }
  if (count < 1 || nA < 1 || nB < 1 || nA + nB > kMaxTotalInputBits) throw Error("header values out of range");
  auto ids = [](const std::string& tok, const std::string& key, int bits) {
    if (tok.rfind(key, 0) != 0) throw Error("expected '" + key + "' field");
    std::vector<Input> v;
    std::istringstream ss(tok.substr(key.size()));
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) throw Error("bad id '" + part + "'");
      Input id = std::stoull(part);
      if (id >= pow2(bits)) throw Error("id " + part + " out of range");
      v.push_back(id);
    }
    return v;
  };
  Overlay o;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    std::string label;
    std::string rows;
    std::string cols;
    ls >> tag >> label >> rows >> cols;
    if (tag != "R" || (label != "0" && label != "1")) throw Error("malformed rectangle record '" + line + "'");
    o.push_back({ids(rows, "rows=", nA), ids(cols, "cols=", nB), static_cast<unsigned>(label[0] - '0')});
  }
  if (static_cast<int>(o.size()) != count) throw Error("rectangle count mismatch");
  if (nAOut) *nAOut = nA;
  if (nBOut) *nBOut = nB;
  return o;
}

std::optional<double> BoundsReport::nmRoundLower(int k) const {
  if (!dExact || k < 1) return std::nullopt;
  return static_cast<double>(*dExact) / k;
}

BoundsReport bounds_report(const SplitFunction& f, int maxExact) {
  BoundsReport r;
  r.distinctRows = distinct_rows(f);
  r.dOneWay = ceil_log2(r.distinctRows);
  r.nmLower = nm_lower_bound_from(static_cast<std::uint64_t>(r.dOneWay));
  r.countingN = std::max(f.nA(), f.nB());
  r.countingBound = r.countingN >= 2 ? counting_bound(r.countingN) : 0;
  if (f.nA() > maxExact || f.nB() > maxExact || f.nA() > 4 || f.nB() > 4) {
    r.dExactReason = "input width above the exact-oracle limit";
  } else {
    r.dExact = exact_cc(f);
    if (!r.dExact) r.dExactReason = "work budget exceeded";
  }
  if (f.nA() <= 2 && f.nB() <= 2 && f.nA() <= maxExact && f.nB() <= maxExact) {
    r.minGbbp = min_gbbp_size(f, 6);
    if (r.minGbbp) {
      r.minGbbpLog = ceil_log2(static_cast<std::uint64_t>(*r.minGbbp));
    } else {
      r.minGbbpReason = "no program with at most 6 nodes";
    }
  } else {
    r.minGbbpReason = "enumeration limited to nA, nB <= 2";
  }
  if (r.minGbbpLog && static_cast<int>(std::ceil(r.nmLower - 1e-9)) > *r.minGbbpLog) {
    r.consistent = false;
    r.notes.push_back("nm lower bound exceeds log of the minimum program size");
  }
  if (r.dExact && (*r.dExact > r.dOneWay + 1 || pow2(*r.dExact) < static_cast<std::uint64_t>(r.dOneWay))) {
    r.consistent = false;
    r.notes.push_back("exact two-way cost outside [log D->, D-> + 1]");
  }
  return r;
}

std::string format_report(const BoundsReport& r) {
  char buf[64];
  std::string out;
  out += "dOneWay=" + std::to_string(r.dOneWay) + "\n";
  out += "distinctRows=" + std::to_string(r.distinctRows) + "\n";
  out += "dExact=" + (r.dExact ? std::to_string(*r.dExact) : "Unavailable (" + r.dExactReason + ")") + "\n";
  std::snprintf(buf, sizeof buf, "%.4f", r.countingBound);
  out += std::string("countingBound=") + buf + " n=" + std::to_string(r.countingN) + "\n";
  std::snprintf(buf, sizeof buf, "%.4f", r.nmLower);
  out += std::string("nmLower=") + buf + " ceil=" + std::to_string(static_cast<int>(std::ceil(r.nmLower - 1e-9))) + "\n";
  for (int k : {1, 2, 4}) {
    auto v = r.nmRoundLower(k);
    if (v) {
      std::snprintf(buf, sizeof buf, "%.4f", *v);
      out += "nmRoundLower(k=" + std::to_string(k) + ")=" + buf + "\n";
    } else {
      out += "nmRoundLower(k=" + std::to_string(k) + ")=Unavailable\n";
    }
  }
  out += "minGbbp=" + (r.minGbbp ? std::to_string(*r.minGbbp) : "Unavailable (" + r.minGbbpReason + ")") + "\n";
  out += "minGbbpLog=" + (r.minGbbpLog ? std::to_string(*r.minGbbpLog) : std::string("Unavailable")) + "\n";
  out += std::string("consistent=") + (r.consistent ? "true" : "false") + "\n";
  for (const auto& n : r.notes) out += "note=" + n + "\n";
  return out;
}

}  // namespace memoryless
