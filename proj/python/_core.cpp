#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "cmqop/cli_reports.hpp"
#include "cmqop/cm_model.hpp"
#include "cmqop/errors.hpp"
#include "cmqop/hypergeom.hpp"
#include "cmqop/special_fn.hpp"

namespace py = pybind11;
using namespace cmqop;

namespace {

// Reports cross the boundary as JSON text; the Python side parses it.
std::string run_json(const std::string& experiment, const std::map<std::string, std::string>& settings) {
  ExperimentConfig cfg;
  cfg.experiment = parse_experiment(experiment);
  for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
  return run(cfg).to_json().dump();
}

cplx hypergeom_value(const std::vector<double>& u, double lambda, const std::vector<double>& t, double tol) {
  return extended_hypergeom(SpectralParameter(u, lambda), ChamberPoint(t), tol).value;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Q-operator numerics for the hyperbolic Calogero-Moser system";
  m.attr("__version__") = kVersion;

  // Later registrations are tried first, so the base class goes first.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<PoleError>(m, "PoleError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());

  m.def("log_gamma", &log_gamma, py::arg("z"));
  m.def("cosh_fourier_gamma", &cosh_fourier_gamma, py::arg("v"), py::arg("lam"));
  m.def(
      "eigenvalue_mu",
      [](double xi, const std::vector<double>& u, double lambda) {
        return eigenvalue_mu(xi, SpectralParameter(u, lambda));
      },
      py::arg("xi"), py::arg("u"), py::arg("lam"));
  m.def(
      "difference_eq_residual",
      [](double xi, const std::vector<double>& u, double lambda) {
        return difference_eq_residual(xi, SpectralParameter(u, lambda));
      },
      py::arg("xi"), py::arg("u"), py::arg("lam"));
  m.def("extended_hypergeom", &hypergeom_value, py::arg("u"), py::arg("lam"), py::arg("t"),
        py::arg("tol") = 1e-12);
  m.def(
      "dominant_asymptotics",
      [](const std::vector<double>& u, double lambda, const std::vector<double>& t) {
        return dominant_asymptotics(SpectralParameter(u, lambda), ChamberPoint(t));
      },
      py::arg("u"), py::arg("lam"), py::arg("t"));
  m.def("a1_oracle", &a1_oracle, py::arg("v"), py::arg("lam"), py::arg("s"));
  m.def(
      "weight_W", [](double lambda, const std::vector<double>& s) { return weight_W(lambda, s); },
      py::arg("lam"), py::arg("s"));
  m.def(
      "kernel_K",
      [](double lambda, const std::vector<double>& t, const std::vector<double>& s) {
        return kernel_K(lambda, t, s);
      },
      py::arg("lam"), py::arg("t"), py::arg("s"));
  m.def(
      "qz_kernel",
      [](double xi, double lambda, const std::vector<double>& t, const std::vector<double>& s) {
        return qz_kernel(xi, lambda, t, s);
      },
      py::arg("xi"), py::arg("lam"), py::arg("t"), py::arg("s"));
  m.def("truncation_radius", &truncation_radius, py::arg("lam"), py::arg("n"), py::arg("tol"));
  m.def(
      "hc_coefficients",
      [](const std::vector<cplx>& xi, double lambda, int max_degree) {
        const auto table = hc_coefficients(xi, lambda, max_degree);
        std::vector<std::pair<std::vector<int>, cplx>> out;
        out.reserve(table.size());
        for (std::size_t k = 0; k < table.size(); ++k) out.emplace_back(table.weight(k).m, table.coefficient(k));
        return out;
      },
      py::arg("xi"), py::arg("lam"), py::arg("max_degree"),
      "List of (m, Delta) pairs, m the simple-root multiplicities.");
  m.def("_run_json", &run_json, py::arg("experiment"), py::arg("settings"),
        py::call_guard<py::gil_scoped_release>());
}
