#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memoryless/bbp.hpp"
#include "memoryless/bounds.hpp"
#include "memoryless/gardenhose.hpp"
#include "memoryless/m_protocol.hpp"
#include "memoryless/s_protocol.hpp"

namespace py = pybind11;
using namespace memoryless;

namespace {

// Accepts either a bit string or an integer.
Input to_input(const py::object& v, int width) {
  if (py::isinstance<py::str>(v)) return parse_bits(v.cast<std::string>(), width);
  return v.cast<Input>();
}

NmProtocol build_named(const std::string& name, int n) {
  if (name == "eq") return build_eq(n);
  if (name == "ip") return build_ip(n);
  if (name == "disj") return build_disj(n);
  if (name == "maj") return build_maj(n);
  if (name == "parity") return build_parity(n);
  if (name == "isa") return build_isa_nm(IsaParams::from_m(n));
  throw Error("unknown protocol '" + name + "'");
}

py::dict report_dict(const VerifyReport& r) {
  py::dict d;
  d["correct"] = r.correct;
  d["pairs"] = r.pairs;
  d["worst_rounds"] = r.worstRounds;
  d["failure_count"] = r.failureCount;
  py::list failures;
  for (const auto& f : r.failures) failures.append(py::make_tuple(f.x, f.y, f.detail));
  d["failures"] = failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  // Translators run newest first, so the subclass is registered last.
  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ScaleError>(m, "ScaleError", error.ptr());

  py::class_<SplitFunction>(m, "SplitFunction")
      .def_property_readonly("na", &SplitFunction::nA)
      .def_property_readonly("nb", &SplitFunction::nB)
      .def("__call__", [](const SplitFunction& f, const py::object& x, const py::object& y) {
        return f.eval(to_input(x, f.nA()), to_input(y, f.nB()));
      })
      .def("to_text", &format_function)
      .def_static("from_text", [](const std::string& s) { return parse_function(s); });
  m.def("make_function", [](const std::string& name, int n) { return make_named_function(name, n); }, py::arg("name"), py::arg("n"));

  py::class_<NmProtocol>(m, "NmProtocol")
      .def_property_readonly("width", &NmProtocol::s)
      .def_property_readonly("na", &NmProtocol::nA)
      .def_property_readonly("nb", &NmProtocol::nB)
      .def("run", [](const NmProtocol& p, const py::object& x, const py::object& y) {
        auto t = run_nm(p, to_input(x, p.nA()), to_input(y, p.nB()));
        if (t.outcome != Outcome::Halted) return py::object(py::none());
        return py::object(py::make_tuple(t.output, t.rounds));
      })
      .def("verify", [](const NmProtocol& p, const SplitFunction& f, int jobs) { return report_dict(verify_protocol(p, f, jobs)); },
           py::arg("f"), py::arg("jobs") = 0)
      .def("to_text", &format_nm)
      .def_static("from_text", [](const std::string& s) { return parse_nm(s); });
  m.def("build_protocol", &build_named, py::arg("name"), py::arg("n"));
  m.def("target_width", &target_width, py::arg("name"), py::arg("n"));

  py::class_<Gbbp>(m, "Gbbp")
      .def_property_readonly("size", &Gbbp::size)
      .def("__call__", [](const Gbbp& g, const py::object& x, const py::object& y) { return g.eval(to_input(x, g.nA()), to_input(y, g.nB())); })
      .def("verify", [](const Gbbp& g, const SplitFunction& f, int jobs) { return report_dict(verify_gbbp(g, f, jobs)); }, py::arg("f"),
           py::arg("jobs") = 0)
      .def("to_text", &format_gbbp);
  m.def("nm_to_gbbp", &nm_to_gbbp);
  m.def("gbbp_to_nm", &gbbp_to_nm);
  m.def("gbbp_to_bbp", &gbbp_to_bbp);
  m.def("min_gbbp_size", &min_gbbp_size, py::arg("f"), py::arg("max_size") = 6);

  py::class_<GhConfig>(m, "GhConfig")
      .def_property_readonly("pipes", &GhConfig::pipes)
      .def("simulate", [](const GhConfig& c, const py::object& x, const py::object& y) {
        auto r = simulate_flow(c, to_input(x, c.nA()), to_input(y, c.nB()));
        return py::make_tuple(std::string(to_string(r.spillSide)), r.output);
      })
      .def("verify", [](const GhConfig& c, const SplitFunction& f, int jobs) { return report_dict(verify_gh(c, f, jobs)); }, py::arg("f"),
           py::arg("jobs") = 0)
      .def("to_text", &format_gh);
  m.def("nm_to_gh", &nm_to_gh, py::arg("p"), py::arg("jobs") = 0);
  m.def("gh_to_nm", &gh_to_nm);
  m.def("build_gh_isa", [](int m_) { return build_gh_isa(IsaParams::from_m(m_)); }, py::arg("m"));
  m.def("build_gh_qdisj", py::overload_cast<int>(&build_gh_qdisj), py::arg("n"));

  py::class_<SProtocol>(m, "SProtocol")
      .def_property_readonly("width", &SProtocol::w)
      .def("verify", [](const SProtocol& p, const SplitFunction& f, int jobs) { return report_dict(verify_s(p, f, jobs)); }, py::arg("f"),
           py::arg("jobs") = 0);
  m.def("nm_to_s", &nm_to_s);
  m.def("s_to_nm", &s_to_nm, py::arg("p"), py::arg("jobs") = 0);

  m.def("one_way_cc", &one_way_cc);
  m.def("nm_lower_bound", &nm_lower_bound);
  m.def("counting_bound", &counting_bound);
  m.def("exact_cc", [](const SplitFunction& f) { return exact_cc(f); });
  m.def("bounds_report", [](const SplitFunction& f, int maxExact) { return format_report(bounds_report(f, maxExact)); }, py::arg("f"),
        py::arg("max_exact") = 4);
}
