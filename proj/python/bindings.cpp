#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bcsp/api.hpp"
#include "bcsp/gaussian.hpp"
#include "bcsp/verify.hpp"

namespace py = pybind11;
using bcsp::json;

namespace {

json parse(const std::string& s) {
  if (s.empty()) return json::object();
  try {
    return json::parse(s);
  } catch (const json::parse_error& e) {
    throw bcsp::StructuralError(std::string("invalid JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return bcsp::dump_json(j, -1); }

}  // namespace

PYBIND11_MODULE(_bcsp, m) {
  m.doc() = "Biased CSP toolkit bindings (JSON in, JSON out)";
  py::register_exception<bcsp::StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<bcsp::DomainError>(m, "DomainError", PyExc_RuntimeError);

  auto nogil = py::call_guard<py::gil_scoped_release>();

  m.def(
      "analyze_predicate",
      [](const std::string& spec) {
        bool is_json = !spec.empty() && (spec.front() == '{' || spec.front() == '"');
        auto p = is_json ? bcsp::parse_predicate_json(parse(spec)) : bcsp::parse_named_predicate(spec);
        return dump(bcsp::api::analyze_predicate(p));
      },
      py::arg("spec"), nogil);
  m.def(
      "brute_force",
      [](const std::string& inst, double mu, const std::string& mode, const std::string& problem, int threads) {
        return dump(bcsp::api::brute_force(parse(inst), mu, mode, problem, threads));
      },
      py::arg("instance"), py::arg("mu"), py::arg("mode") = "at-most", py::arg("problem") = "dksh",
      py::arg("threads") = 1, nogil);
  m.def(
      "reduce",
      [](const std::string& kind, const std::string& inst, const std::string& params, std::uint64_t seed) {
        return dump(bcsp::api::reduce(kind, parse(inst), parse(params), seed));
      },
      py::arg("kind"), py::arg("instance"), py::arg("params") = "", py::arg("seed") = 0, nogil);
  m.def(
      "solve",
      [](const std::string& problem, const std::string& inst, std::optional<double> bias, const std::string& config,
         const std::string& algorithm) {
        auto cfg = bcsp::api::config_from_json(parse(config));
        return dump(bcsp::api::solve(problem, parse(inst), bias, cfg, algorithm));
      },
      py::arg("problem"), py::arg("instance"), py::arg("bias") = std::nullopt, py::arg("config") = "",
      py::arg("algorithm") = "auto", nogil);
  m.def(
      "gadget",
      [](const std::string& test, const std::string& assignment, const std::string& params) {
        return dump(bcsp::api::gadget(test, assignment, parse(params)));
      },
      py::arg("test"), py::arg("assignment") = "dictator", py::arg("params") = "", nogil);
  m.def("gamma", [](double rho, const std::vector<double>& mus) { return bcsp::gaussian_stability(rho, mus); },
        py::arg("rho"), py::arg("mus"), nogil);
  m.def(
      "verify",
      [](const std::string& claim, std::size_t n_max, std::uint64_t seed, int threads, int trials,
         std::uint64_t samples) {
        bcsp::SuiteOptions o{n_max, seed, threads, trials, samples};
        return dump(bcsp::to_json(bcsp::run_suite(claim, o)));
      },
      py::arg("claim"), py::arg("n_max") = 0, py::arg("seed") = 0, py::arg("threads") = 1, py::arg("trials") = 0,
      py::arg("samples") = 0, nogil);
  m.def("suite_names", &bcsp::suite_names);
}
