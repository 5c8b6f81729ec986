#include <memory>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "w3cert/analytic.hpp"
#include "w3cert/devices.hpp"
#include "w3cert/extraction.hpp"
#include "w3cert/moments.hpp"
#include "w3cert/sdpa.hpp"
#include "w3cert/sdpsolve.hpp"
#include "w3cert/tilted.hpp"

namespace py = pybind11;
using namespace w3cert;

namespace {

Realization w3_with_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw py::value_error("visibility must lie in [0, 1]");
  return v == 1.0 ? ideal_w3_realization() : qubit_w3_realization(depolarize(w3_state(), v));
}

py::dict statistics_dict(const StatisticsTable& t) {
  py::dict d;
  const auto& specs = correlator_specs();
  for (std::size_t i = 0; i < kCorrelatorCount; ++i) d[py::str(std::string(specs[i].name))] = t.correlators[i];
  for (std::size_t i = 0; i < kTripleCount; ++i) d[py::str(triple_name(i))] = t.triples[i];
  return d;
}

DeviationVector deviation_from(const std::vector<double>& eps) {
  if (eps.size() != kDeviationCount) throw py::value_error("expected 18 deviations");
  DeviationVector d;
  std::copy(eps.begin(), eps.end(), d.eps.begin());
  return d;
}

SdpProblem problem(const std::string& preset, double eps, bool triples) {
  auto t = std::make_shared<const MomentMatrixTemplate>(preset_words(parse_preset(preset)));
  return assemble_sdp(std::move(t), eps, {.include_triples = triples});
}

}  // namespace

PYBIND11_MODULE(_w3cert, m) {
  m.doc() = "W-state self-testing: statistics, isometry extraction and robustness bounds";

  m.def("ideal_statistics", [] { return statistics_dict(ideal_statistics()); });
  m.def(
      "statistics", [](double v) { return statistics_dict(statistics(w3_with_visibility(v))); },
      py::arg("visibility") = 1.0);
  m.def(
      "sample_statistics",
      [](double v, std::int64_t shots, std::uint64_t seed) {
        return statistics_dict(sample_statistics(w3_with_visibility(v), shots, seed));
      },
      py::arg("visibility"), py::arg("shots"), py::arg("seed") = 1);
  m.def(
      "deviations",
      [](double v) {
        const auto d = deviations(statistics(w3_with_visibility(v)));
        return std::vector<double>(d.eps.begin(), d.eps.end());
      },
      py::arg("visibility"));

  m.def(
      "swap_fidelity", [](double v) { return swap_fidelity(w3_with_visibility(v), w3_state()); },
      py::arg("visibility") = 1.0);
  m.def(
      "norm_distance", [](double v) { return norm_distance(w3_with_visibility(v)); }, py::arg("visibility") = 1.0);

  m.def(
      "norm_bound_closed", [](double eps) { return norm_bound_closed(eps).clamped; }, py::arg("eps"));
  m.def(
      "norm_bound_general", [](const std::vector<double>& eps) { return norm_bound_general(deviation_from(eps)); },
      py::arg("eps"));
  m.def("closed_form_threshold", &closed_form_threshold);

  m.def("psd_project", &psd_project, py::arg("s"));
  m.def(
      "preset_size", [](const std::string& preset) { return preset_words(parse_preset(preset)).size(); },
      py::arg("preset"));
  m.def(
      "sdp_bound",
      [](const std::string& preset, double eps, const std::string& method, bool triples) {
        SolverSettings s;
        if (method == "admm") {
          s.method = SolverMethod::Admm;
        } else if (method != "ipm") {
          throw py::value_error("method must be 'ipm' or 'admm'");
        }
        SdpSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve(problem(preset, eps, triples), s);
        }
        py::dict d;
        d["status"] = status_name(sol.status);
        d["bound"] = sol.bound;
        d["primal_objective"] = sol.primal_objective;
        d["primal_residual"] = sol.primal_residual;
        d["dual_residual"] = sol.dual_residual;
        d["iterations"] = sol.iterations;
        return d;
      },
      py::arg("preset") = "level2", py::arg("eps") = 0.0, py::arg("method") = "ipm", py::arg("triples") = true);
  m.def(
      "export_sdpa", [](const std::string& preset, double eps, bool triples) {
        return export_sdpa(problem(preset, eps, triples));
      },
      py::arg("preset") = "level2", py::arg("eps") = 0.0, py::arg("triples") = true);
  m.def(
      "reexport_sdpa", [](const std::string& text) { return export_sdpa(from_sdpa(parse_sdpa(text))); },
      py::arg("text"));

  m.def(
      "tilted_params",
      [](double gamma) {
        const auto p = tilted_params(gamma);
        py::dict d;
        d["gamma"] = p.gamma;
        d["alpha"] = p.alpha;
        d["mu"] = p.mu;
        d["beta_star"] = p.beta_star;
        return d;
      },
      py::arg("gamma"));
  m.def(
      "tilted_bell_max", [](double alpha, int grid) { return tilted_bell_max(alpha, grid).value; }, py::arg("alpha"),
      py::arg("grid") = 48);
  m.def(
      "family_extraction",
      [](double gamma, double v) {
        const auto r = v == 1.0 ? family_realization(gamma) : family_realization(gamma, depolarize(psi_gamma(gamma), v));
        return family_extraction(r, gamma);
      },
      py::arg("gamma"), py::arg("visibility") = 1.0);

}
