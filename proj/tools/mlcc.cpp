// mlcc: command-line front end for the memoryless communication toolkit.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "memoryless/bbp.hpp"
#include "memoryless/boolfn.hpp"
#include "memoryless/bounds.hpp"
#include "memoryless/gardenhose.hpp"
#include "memoryless/m_protocol.hpp"
#include "memoryless/nm_protocol.hpp"
#include "memoryless/s_protocol.hpp"

using namespace memoryless;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitScale = 3;

// Exhaustive re-verification of conversions is on by default up to this many pairs.
constexpr std::uint64_t kAutoVerifyPairs = std::uint64_t{1} << 16;

struct UsageError : Error {
  using Error::Error;
};

struct ValidationFailure : Error {
  using Error::Error;
};

enum class Kind { Function, Nm, MOneWay, S, Gbbp, Gh, Overlay };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

Kind detect(const std::string& text) {
  auto starts = [&](const char* key) { return text.rfind(key, 0) == 0; };
  if (starts("na=")) return Kind::Function;
  if (starts("s=")) return Kind::Nm;
  if (starts("t=")) return Kind::MOneWay;
  if (starts("w=")) return Kind::S;
  if (starts("k=")) return Kind::Gbbp;
  if (starts("pipes=")) return Kind::Gh;
  if (starts("count=")) return Kind::Overlay;
  throw Error("unrecognized artifact header");
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string witness(Input x, Input y, int nA, int nB, const std::string& detail) {
  return "witness x=" + to_bits(x, nA) + " y=" + to_bits(y, nB) + (detail.empty() ? "" : " " + detail);
}

void require(const VerifyReport& r, int nA, int nB, const std::string& what) {
  if (r.correct) return;
  const auto& f = r.failures.front();
  throw ValidationFailure(what + " failed on " + std::to_string(r.failureCount) + " pairs; " + witness(f.x, f.y, nA, nB, f.detail));
}

// Outputs of a source artifact, evaluated pair by pair; halted=false marks a non-halting run.
struct PairResult {
  bool halted = true;
  unsigned output = 0;
};

PairResult nm_result(const NmProtocol& p, Input x, Input y) {
  auto t = run_nm(p, x, y);
  return {t.outcome == Outcome::Halted, t.output};
}

template <typename Src, typename Dst>
VerifyReport compare_pairs(int nA, int nB, int jobs, Src&& src, Dst&& dst) {
  return verify_all_pairs(pow2(nA), pow2(nB), jobs, [&](Input x, Input y, int&, std::string& detail) {
    PairResult a = src(x, y);
    PairResult b = dst(x, y);
    if (a.halted && b.halted && a.output == b.output) return true;
    detail = "source=" + (a.halted ? std::to_string(a.output) : std::string("loop")) +
             " result=" + (b.halted ? std::to_string(b.output) : std::string("loop"));
    return false;
  });
}

struct Options {
  int jobs = 0;
};

// ---- fn ----

int cmd_fn_make(const std::string& name, int n, const std::string& out) {
  write_output(out, format_function(make_named_function(upper(name), n)));
  return 0;
}

int cmd_fn_eval(const std::string& path, const std::string& xs, const std::string& ys) {
  auto f = parse_function(read_file(path));
  std::cout << "output=" << f.eval(parse_bits(xs, f.nA()), parse_bits(ys, f.nB())) << "\n";
  return 0;
}

// ---- proto ----

int cmd_proto_build(const std::string& name, int n, const std::string& out) {
  std::string key = upper(name);
  if (key == "EQ") {
    write_output(out, format_nm(build_eq(n)));
  } else if (key == "IP") {
    write_output(out, format_nm(build_ip(n)));
  } else if (key == "DISJ") {
    write_output(out, format_nm(build_disj(n)));
  } else if (key == "MAJ") {
    write_output(out, format_nm(build_maj(n)));
  } else if (key == "PARITY") {
    write_output(out, format_nm(build_parity(n)));
  } else if (key == "ISA") {
    write_output(out, format_nm(build_isa_nm(IsaParams::from_m(n))));
  } else if (key == "MTO-DISJ") {
    write_output(out, format_m_oneway(build_m_oneway_disj(n)));
  } else if (key == "MTO-QDISJ") {
    write_output(out, format_m_oneway(build_m_oneway_qdisj(n)));
  } else if (key == "PARITY-GBBP") {
    write_output(out, format_gbbp(build_parity_gbbp(n)));
  } else if (key == "GH-ISA") {
    write_output(out, format_gh(build_gh_isa(IsaParams::from_m(n))));
  } else if (key == "GH-QDISJ") {
    write_output(out, format_gh(build_gh_qdisj(n)));
  } else {
    throw UsageError("unknown protocol '" + name + "'");
  }
  return 0;
}

int cmd_proto_run(const std::string& path, const std::string& xs, const std::string& ys, bool trace) {
  std::string text = read_file(path);
  switch (detect(text)) {
    case Kind::Nm: {
      auto p = parse_nm(text);
      auto t = run_nm(p, parse_bits(xs, p.nA()), parse_bits(ys, p.nB()), trace);
      if (trace) {
        for (const auto& m : t.messages) std::cout << to_string(m.sender) << " " << to_bits(m.msg, p.s()) << "\n";
      }
      std::cout << describe(t, p.s()) << "\n";
      return t.outcome == Outcome::Halted ? 0 : kExitValidation;
    }
    case Kind::MOneWay: {
      auto p = parse_m_oneway(text);
      Input x = parse_bits(xs, p.nA);
      Input y = parse_bits(ys, p.nB);
      auto o = run_m_oneway(p, x, y);
      if (trace) {
        for (int i = 0; i < o.rounds; ++i) std::cout << "Alice " << to_bits(p.schedule[x][static_cast<std::size_t>(i)], p.t) << "\n";
      }
      if (!o.decided) {
        std::cout << "undecided rounds=" << o.rounds << "\n";
        return kExitValidation;
      }
      std::cout << "halted output=" << o.output << " rounds=" << o.rounds << "\n";
      return 0;
    }
    case Kind::S: {
      auto p = parse_s(text);
      auto o = run_s(p, parse_bits(xs, p.nA()), parse_bits(ys, p.nB()));
      if (o.outcome != Outcome::Halted) {
        std::cout << "nonhalting regA=" << to_bits(o.regA, p.w()) << " regB=" << to_bits(o.regB, p.w()) << " bit=" << o.bit
                  << " turn=" << to_string(o.turn) << "\n";
        return kExitValidation;
      }
      std::cout << "halted output=" << o.output << " rounds=" << o.rounds << "\n";
      return 0;
    }
    case Kind::Gbbp: {
      auto g = parse_gbbp(text);
      std::cout << "output=" << g.eval(parse_bits(xs, g.nA()), parse_bits(ys, g.nB())) << "\n";
      return 0;
    }
    default:
      throw UsageError("proto run expects an NM, M->, S or GBBP file");
  }
}

int cmd_proto_verify(const std::string& protoPath, const std::string& fnPath, const Options& opt) {
  std::string text = read_file(protoPath);
  auto f = parse_function(read_file(fnPath));
  VerifyReport r;
  int width = 0;
  switch (detect(text)) {
    case Kind::Nm: {
      auto p = parse_nm(text);
      width = p.s();
      r = verify_protocol(p, f, opt.jobs);
      break;
    }
    case Kind::MOneWay: {
      auto p = parse_m_oneway(text);
      width = p.t;
      r = verify_m_oneway(p, f, opt.jobs);
      break;
    }
    case Kind::S: {
      auto p = parse_s(text);
      width = p.w();
      r = verify_s(p, f, opt.jobs);
      break;
    }
    case Kind::Gbbp: {
      auto g = parse_gbbp(text);
      width = g.size();
      r = verify_gbbp(g, f, opt.jobs);
      break;
    }
    case Kind::Gh: {
      auto c = parse_gh(text);
      width = c.pipes();
      r = verify_gh(c, f, opt.jobs);
      break;
    }
    default:
      throw UsageError("proto verify expects a protocol, program or config file");
  }
  std::cout << "correct=" << (r.correct ? "true" : "false") << " pairs=" << r.pairs << " width=" << width << "\n";
  if (!r.correct) {
    const auto& w = r.failures.front();
    std::cout << witness(w.x, w.y, f.nA(), f.nB(), w.detail) << "\n";
    return kExitValidation;
  }
  return 0;
}

// ---- convert ----

struct ConvertFlags {
  std::string check;
  bool noVerify = false;
  bool forceVerify = false;
};

bool should_verify(int nA, int nB, const ConvertFlags& flags) {
  if (flags.noVerify) return false;
  return flags.forceVerify || pow2(nA) * pow2(nB) <= kAutoVerifyPairs;
}

int cmd_convert(const std::string& kind, const std::string& in, const std::string& out, const ConvertFlags& flags,
                const Options& opt) {
  std::string text = read_file(in);
  std::optional<SplitFunction> f;
  if (!flags.check.empty()) f = parse_function(read_file(flags.check));
  auto expect = [&](Kind k, const char* what) {
    if (detect(text) != k) throw UsageError(kind + " expects " + what + " input");
  };
  auto check_fn = [&](int nA, int nB, auto&& result) {
    if (!f) return;
    if (f->nA() != nA || f->nB() != nB) throw ValidationFailure("check function input widths differ from the artifact");
    auto r = verify_all_pairs(f->rows(), f->cols(), opt.jobs, [&](Input x, Input y, int&, std::string& detail) {
      PairResult p = result(x, y);
      if (p.halted && p.output == f->at(x, y)) return true;
      detail = p.halted ? "output=" + std::to_string(p.output) : std::string("loop");
      return false;
    });
    require(r, nA, nB, "check against function");
  };
  std::string result;
  if (kind == "nm-to-gbbp") {
    expect(Kind::Nm, "an NM protocol");
    auto p = parse_nm(text);
    auto g = nm_to_gbbp(p);
    auto dst = [&](Input x, Input y) { return PairResult{true, g.eval(x, y)}; };
    if (should_verify(p.nA(), p.nB(), flags)) {
      require(compare_pairs(p.nA(), p.nB(), opt.jobs, [&](Input x, Input y) { return nm_result(p, x, y); }, dst), p.nA(), p.nB(),
              "equivalence");
    }
    check_fn(p.nA(), p.nB(), dst);
    result = format_gbbp(g);
  } else if (kind == "gbbp-to-nm" || kind == "gbbp-to-bbp") {
    expect(Kind::Gbbp, "a GBBP");
    auto g = parse_gbbp(text);
    auto src = [&](Input x, Input y) { return PairResult{true, g.eval(x, y)}; };
    if (kind == "gbbp-to-nm") {
      auto p = gbbp_to_nm(g);
      auto dst = [&](Input x, Input y) { return nm_result(p, x, y); };
      if (should_verify(g.nA(), g.nB(), flags)) require(compare_pairs(g.nA(), g.nB(), opt.jobs, src, dst), g.nA(), g.nB(), "equivalence");
      check_fn(g.nA(), g.nB(), dst);
      result = format_nm(p);
    } else {
      auto b = gbbp_to_bbp(g);
      auto dst = [&](Input x, Input y) { return PairResult{true, b.eval(x, y)}; };
      if (should_verify(g.nA(), g.nB(), flags)) require(compare_pairs(g.nA(), g.nB(), opt.jobs, src, dst), g.nA(), g.nB(), "equivalence");
      check_fn(g.nA(), g.nB(), dst);
      result = format_gbbp(b);
    }
  } else if (kind == "nm-to-gh") {
    expect(Kind::Nm, "an NM protocol");
    auto p = parse_nm(text);
    auto c = nm_to_gh(p, opt.jobs);
    if (should_verify(p.nA(), p.nB(), flags)) require(compare_gh_nm(c, p, opt.jobs), p.nA(), p.nB(), "equivalence");
    check_fn(p.nA(), p.nB(), [&](Input x, Input y) { return PairResult{true, simulate_flow(c, x, y).output}; });
    result = format_gh(c);
  } else if (kind == "gh-to-nm") {
    expect(Kind::Gh, "a garden-hose config");
    auto c = parse_gh(text);
    auto p = gh_to_nm(c);
    if (should_verify(c.nA(), c.nB(), flags)) require(compare_gh_nm(c, p, opt.jobs), c.nA(), c.nB(), "equivalence");
    check_fn(c.nA(), c.nB(), [&](Input x, Input y) { return nm_result(p, x, y); });
    result = format_nm(p);
  } else if (kind == "nm-to-s") {
    expect(Kind::Nm, "an NM protocol");
    auto p = parse_nm(text);
    auto sp = nm_to_s(p);
    auto dst = [&](Input x, Input y) {
      auto o = run_s(sp, x, y);
      return PairResult{o.outcome == Outcome::Halted, o.output};
    };
    if (should_verify(p.nA(), p.nB(), flags)) {
      require(compare_pairs(p.nA(), p.nB(), opt.jobs, [&](Input x, Input y) { return nm_result(p, x, y); }, dst), p.nA(), p.nB(),
              "equivalence");
    }
    check_fn(p.nA(), p.nB(), dst);
    result = format_s(sp);
  } else if (kind == "s-to-nm") {
    expect(Kind::S, "an S protocol");
    auto sp = parse_s(text);
    auto p = s_to_nm(sp, opt.jobs);
    auto src = [&](Input x, Input y) {
      auto o = run_s(sp, x, y);
      return PairResult{o.outcome == Outcome::Halted, o.output};
    };
    auto dst = [&](Input x, Input y) { return nm_result(p, x, y); };
    if (should_verify(sp.nA(), sp.nB(), flags)) require(compare_pairs(sp.nA(), sp.nB(), opt.jobs, src, dst), sp.nA(), sp.nB(), "equivalence");
    check_fn(sp.nA(), sp.nB(), dst);
    result = format_nm(p);
  } else if (kind == "mto-to-nm") {
    expect(Kind::MOneWay, "an M-> protocol");
    auto m = parse_m_oneway(text);
    auto p = m_oneway_to_nm(m);
    auto src = [&](Input x, Input y) {
      auto o = run_m_oneway(m, x, y);
      return PairResult{o.decided, o.output};
    };
    auto dst = [&](Input x, Input y) { return nm_result(p, x, y); };
    if (should_verify(m.nA, m.nB, flags)) require(compare_pairs(m.nA, m.nB, opt.jobs, src, dst), m.nA, m.nB, "equivalence");
    check_fn(m.nA, m.nB, dst);
    result = format_nm(p);
  } else if (kind == "overlay-to-mto") {
    expect(Kind::Overlay, "an overlay");
    if (!f) throw UsageError("overlay-to-mto requires --check <fn>");
    int nA = 0;
    int nB = 0;
    auto o = parse_overlay(text, &nA, &nB);
    if (nA != f->nA() || nB != f->nB()) throw ValidationFailure("overlay and function input widths differ");
    auto verdict = verify_overlay(o, *f);
    if (!verdict.ok) throw ValidationFailure("overlay fails " + verdict.condition + "; " + witness(verdict.x, verdict.y, nA, nB, ""));
    auto m = overlay_to_m_oneway(o, *f);
    require(verify_m_oneway(m, *f, opt.jobs), nA, nB, "check against function");
    result = format_m_oneway(m);
  } else {
    throw UsageError("unknown conversion '" + kind + "'");
  }
  write_output(out, result);
  return 0;
}

// ---- gh ----

int cmd_gh_simulate(const std::string& path, const std::string& xs, const std::string& ys, bool trace) {
  auto c = parse_gh(read_file(path));
  auto r = simulate_flow(c, parse_bits(xs, c.nA()), parse_bits(ys, c.nB()));
  if (trace) {
    for (const auto& o : r.path) std::cout << (o.side == Party::Alice ? "A" : "B") << o.pipe << "\n";
  }
  std::cout << "spill=" << to_string(r.spillSide) << " output=" << r.output << "\n";
  return 0;
}

// ---- bounds ----

int cmd_bounds_report(const std::string& path, int maxExact) {
  auto f = parse_function(read_file(path));
  auto r = bounds_report(f, maxExact);
  std::cout << format_report(r);
  return r.consistent ? 0 : kExitValidation;
}

// ---- pipeline ----

std::string fmt(double v) {
  char buf[32];
  if (std::fabs(v - std::round(v)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.3f", v);
  }
  return buf;
}

struct Row {
  std::string stage;
  std::string measure;
  std::string target;
  std::string realized;
  bool verified = false;
};

void print_table(const std::string& title, const std::vector<Row>& rows) {
  std::cout << "# " << title << "\n";
  std::printf("%-22s %-16s %-14s %-10s %s\n", "stage", "measure", "target", "realized", "verified");
  for (const auto& r : rows) {
    std::printf("%-22s %-16s %-14s %-10s %s\n", r.stage.c_str(), r.measure.c_str(), r.target.c_str(), r.realized.c_str(),
                r.verified ? "yes" : "NO");
  }
  std::fflush(stdout);
}

bool all_verified(const std::vector<Row>& rows) {
  for (const auto& r : rows) {
    if (!r.verified) return false;
  }
  return true;
}

int demo_nm_chain(const std::string& name, int n, const Options& opt) {
  NmProtocol p = name == "eq" ? build_eq(n) : name == "ip" ? build_ip(n) : name == "disj" ? build_disj(n) : build_parity(n);
  auto f = make_named_function(upper(name), n);
  std::vector<Row> rows;
  const double target = target_width(name, n);
  const int s = p.s();
  rows.push_back({"build", "NM width", fmt(target), std::to_string(s), verify_protocol(p, f, opt.jobs).correct});
  const double lower = std::max(0.0, std::ceil(nm_lower_bound(f) - 1e-9));
  rows.push_back({"bounds", "ceil nm_lower", "-", fmt(lower), s >= lower});
  auto g = nm_to_gbbp(p);
  rows.push_back({"nm-to-gbbp", "GBBP size", "<= " + fmt(std::pow(2.0, s + 1)), std::to_string(g.size()),
                  verify_gbbp(g, f, opt.jobs).correct && static_cast<std::uint64_t>(g.size()) <= pow2(s + 1)});
  auto q = gbbp_to_nm(g);
  rows.push_back({"gbbp-to-nm", "NM width", "<= " + fmt(s + 1), std::to_string(q.s()), verify_protocol(q, f, opt.jobs).correct});
  auto b = gbbp_to_bbp(g);
  rows.push_back({"gbbp-to-bbp", "BBP size", "<= " + std::to_string(g.size() * g.size()), std::to_string(b.size()),
                  verify_gbbp(b, f, opt.jobs).correct && b.size() <= g.size() * g.size()});
  auto c = nm_to_gh(p, opt.jobs);
  const int logPipes = ceil_log2(static_cast<std::uint64_t>(c.pipes()));
  rows.push_back({"nm-to-gh", "GH pipes", "<= 2^" + std::to_string(s + 4), std::to_string(c.pipes()),
                  verify_gh(c, f, opt.jobs).correct && logPipes <= s + 4});
  auto back = gh_to_nm(c);
  rows.push_back({"gh-to-nm", "NM width", "<= " + std::to_string(logPipes + 1), std::to_string(back.s()),
                  verify_protocol(back, f, opt.jobs).correct && back.s() <= std::max(2, logPipes + 1)});
  auto sp = nm_to_s(p);
  const int w = s + ceil_log2(static_cast<std::uint64_t>(s));
  rows.push_back({"nm-to-s", "S register", std::to_string(w), std::to_string(sp.w()), verify_s(sp, f, opt.jobs).correct && sp.w() == w});
  if (n <= 4) {
    auto r = s_to_nm(sp, opt.jobs);
    rows.push_back({"s-to-nm", "NM width", std::to_string(2 * sp.w() + 1), std::to_string(r.s()), verify_protocol(r, f, opt.jobs).correct});
  }
  print_table(upper(name) + " n=" + std::to_string(n), rows);
  return all_verified(rows) ? 0 : kExitValidation;
}

int demo_isa(int m, const Options& opt) {
  auto params = IsaParams::from_m(m);
  auto f = make_isa(params);
  auto p = build_isa_nm(params);
  std::vector<Row> rows;
  rows.push_back({"build", "NM width", fmt(target_width("isa", m)), std::to_string(p.s()), verify_protocol(p, f, opt.jobs).correct});
  auto c = build_gh_isa(params);
  const double target = 16.0 * params.n();
  rows.push_back({"nm-to-gh", "GH pipes", fmt(target) + " (16n)", std::to_string(c.pipes()), verify_gh(c, f, opt.jobs).correct});
  print_table("ISA m=" + std::to_string(m) + " n=" + std::to_string(params.n()), rows);
  std::cout << "slack_factor=" << fmt(c.pipes() / target) << "\n";
  return all_verified(rows) ? 0 : kExitValidation;
}

int demo_qdisj(int n, const Options& opt) {
  auto f = make_named_function("QDISJ", n);
  auto m = build_m_oneway_qdisj(n);
  std::vector<Row> rows;
  rows.push_back({"build", "M-> width", std::to_string(2 * ceil_log2(static_cast<std::uint64_t>(n)) + 1), std::to_string(m.t), verify_m_oneway(m, f, opt.jobs).correct});
  auto p = m_oneway_to_nm(m);
  rows.push_back({"mto-to-nm", "NM width", "<= " + std::to_string(2 * m.t + 1), std::to_string(p.s()), verify_protocol(p, f, opt.jobs).correct});
  auto c = build_gh_qdisj(n);
  const double target = static_cast<double>(n) * n;
  rows.push_back({"nm-to-gh", "GH pipes", fmt(target) + " (n^2)", std::to_string(c.pipes()), verify_gh(c, f, opt.jobs).correct});
  print_table("QDISJ n=" + std::to_string(n), rows);
  std::cout << "slack_factor=" << fmt(c.pipes() / target) << "\n";
  return all_verified(rows) ? 0 : kExitValidation;
}

int cmd_pipeline_demo(const std::string& name, int n, const Options& opt) {
  if (name == "eq" || name == "ip" || name == "disj" || name == "parity") return demo_nm_chain(name, n, opt);
  if (name == "isa") return demo_isa(n, opt);
  if (name == "qdisj") return demo_qdisj(n, opt);
  throw UsageError("unknown pipeline '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memoryless communication protocols: build, run, convert and verify"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--jobs", opt.jobs, "Worker threads for exhaustive checks (0 = all cores)")->check(CLI::NonNegativeNumber);

  std::string name;
  std::string path;
  std::string path2;
  std::string out;
  std::string xs;
  std::string ys;
  int n = 0;
  bool trace = false;
  int maxExact = 4;
  ConvertFlags flags;

  auto* fn = app.add_subcommand("fn", "Truth tables")->require_subcommand(1);
  auto* fnMake = fn->add_subcommand("make", "Materialize a named function");
  fnMake->add_option("name", name, "EQ, IP, DISJ, MAJ, PARITY, ISA, QDISJ or PDIST_TOTAL")->required();
  fnMake->add_option("--n", n, "Bits per side (ISA: m, QDISJ: numbers per side)")->required();
  fnMake->add_option("-o,--output", out, "Output file (stdout when omitted)");
  auto* fnEval = fn->add_subcommand("eval", "Evaluate a truth table");
  fnEval->add_option("file", path)->required();
  fnEval->add_option("--x", xs)->required();
  fnEval->add_option("--y", ys)->required();

  auto* proto = app.add_subcommand("proto", "Protocols")->require_subcommand(1);
  auto* build = proto->add_subcommand("build", "Build a built-in protocol");
  build->add_option("name", name, "eq, ip, disj, maj, parity, isa, mto-disj, mto-qdisj, parity-gbbp, gh-isa, gh-qdisj")->required();
  build->add_option("--n", n)->required();
  build->add_option("-o,--output", out)->required();
  auto* run = proto->add_subcommand("run", "Run a protocol on one input pair");
  run->add_option("proto", path)->required();
  run->add_option("--x", xs)->required();
  run->add_option("--y", ys)->required();
  run->add_flag("--trace", trace, "Print every message");
  auto* verify = proto->add_subcommand("verify", "Check a protocol against a truth table on all pairs");
  verify->add_option("proto", path)->required();
  verify->add_option("fn", path2)->required();

  auto* convert = app.add_subcommand("convert", "Compile between models");
  convert->add_option("kind", name)
      ->required()
      ->check(CLI::IsMember({"nm-to-gbbp", "gbbp-to-nm", "gbbp-to-bbp", "nm-to-gh", "gh-to-nm", "nm-to-s", "s-to-nm", "mto-to-nm",
                             "overlay-to-mto"}));
  convert->add_option("input", path)->required();
  convert->add_option("-o,--output", out)->required();
  convert->add_option("--check", flags.check, "Truth table to verify the result against");
  auto* noVerify = convert->add_flag("--no-verify", flags.noVerify, "Skip the equivalence check");
  convert->add_flag("--verify", flags.forceVerify, "Run the equivalence check even above 2^16 pairs")->excludes(noVerify);

  auto* gh = app.add_subcommand("gh", "Garden-hose configs")->require_subcommand(1);
  auto* simulate = gh->add_subcommand("simulate", "Follow the water for one input pair");
  simulate->add_option("config", path)->required();
  simulate->add_option("--x", xs)->required();
  simulate->add_option("--y", ys)->required();
  simulate->add_flag("--trace", trace, "Print the openings visited");

  auto* bounds = app.add_subcommand("bounds", "Lower-bound oracles")->require_subcommand(1);
  auto* report = bounds->add_subcommand("report", "Report bounds for a truth table");
  report->add_option("fn", path)->required();
  report->add_option("--max-exact", maxExact, "Largest side width for exact oracles")->check(CLI::NonNegativeNumber);

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end chains")->require_subcommand(1);
  auto* demo = pipeline->add_subcommand("demo", "Build, convert and verify, then print a cost table");
  demo->add_option("name", name)->required()->check(CLI::IsMember({"eq", "ip", "disj", "parity", "isa", "qdisj"}));
  demo->add_option("--n", n)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fnMake) return cmd_fn_make(name, n, out);
    if (*fnEval) return cmd_fn_eval(path, xs, ys);
    if (*build) return cmd_proto_build(name, n, out);
    if (*run) return cmd_proto_run(path, xs, ys, trace);
    if (*verify) return cmd_proto_verify(path, path2, opt);
    if (*convert) return cmd_convert(name, path, out, flags, opt);
    if (*simulate) return cmd_gh_simulate(path, xs, ys, trace);
    if (*report) return cmd_bounds_report(path, maxExact);
    if (*demo) return cmd_pipeline_demo(name, n, opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScaleError& e) {
    std::cerr << "error: scale: " << e.what() << "\n";
    return kExitScale;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
