#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "surge/breakdown.hpp"
#include "surge/cli.hpp"
#include "surge/errors.hpp"
#include "surge/excitation.hpp"
#include "surge/model.hpp"
#include "surge/simulation.hpp"
#include "surge/soil.hpp"

namespace py = pybind11;
using namespace surge;

namespace {

ElectrodeArray array_from(const std::string& kind, double a, double n, const std::vector<double>& electrodes) {
  ArrayConfig cfg;
  cfg.kind = kind;
  cfg.a = a;
  cfg.n = n;
  cfg.electrodes = electrodes;
  return make_array(cfg);
}

std::vector<std::string> diagnostics_of(const std::string& path) {
  std::ostringstream err;
  cmd_check(path, err);
  std::vector<std::string> out;
  std::istringstream in(err.str());
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

py::dict model_summary(const Model& m) {
  py::dict d;
  d["nx"] = m.grid.nx;
  d["ny"] = m.grid.ny;
  d["nz"] = m.grid.nz;
  d["delta"] = m.grid.delta;
  d["dt"] = m.grid.dt;
  d["n_steps"] = m.grid.n_steps;
  d["record_every"] = m.record_every();
  d["pml_cells"] = m.pml_cells();
  std::vector<std::string> probes;
  for (const auto& p : m.probes) probes.push_back(p.name);
  d["probes"] = probes;
  return d;
}

// Runs a model file in-process and returns the probe records as arrays.
py::dict run_model(const std::string& path, std::optional<double> calctime, std::optional<long> max_steps,
                   int threads) {
  Model m = load_model_file(path);
  if (calctime) {
    if (!(*calctime > 0)) throw ParameterError("calctime must be positive");
    m.calctime = *calctime;
    m.grid.n_steps = long(std::ceil(m.calctime / m.grid.dt - 1e-9));
  }
  set_thread_count(threads);
  Simulation sim(build_simulation_input(m));
  long steps = m.grid.n_steps;
  if (max_steps) steps = std::min(steps, *max_steps);
  std::vector<double> time;
  std::vector<std::vector<double>> cols(sim.probe_names().size());
  RunReport rep;
  {
    py::gil_scoped_release release;
    rep = run_simulation(sim, steps, m.record_every(), [&](double t, const std::vector<double>& v) {
      time.push_back(t);
      for (std::size_t c = 0; c < v.size(); ++c) cols[c].push_back(v[c]);
    });
  }
  if (rep.failed_step >= 0)
    throw ComputationError("non-finite field values at step " + std::to_string(rep.failed_step));
  py::dict out;
  out["time"] = py::array_t<double>(py::ssize_t(time.size()), time.data());
  const auto names = sim.probe_names();
  for (std::size_t c = 0; c < names.size(); ++c)
    out[py::str(names[c])] = py::array_t<double>(py::ssize_t(cols[c].size()), cols[c].data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "FDTD transient simulator for grounding and lightning studies.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);

  m.def("courant_dt", &courant_dt, py::arg("delta"), py::arg("cfl") = 0.99,
        "Largest stable time step of a cubic cell, scaled by cfl.");

  m.def(
      "heidler",
      [](double t, double i0, double tau1, double tau2, double n) {
        const HeidlerTerm h{i0, tau1, tau2, n};
        check_heidler(h);
        return heidler_eval(std::span<const HeidlerTerm>(&h, 1), t);
      },
      py::arg("t"), py::arg("i0"), py::arg("tau1"), py::arg("tau2"), py::arg("n"));

  m.def(
      "load_model",
      [](const std::string& text) { return model_summary(load_model(text)); }, py::arg("text"),
      "Parses and validates model text; returns the grid summary.");
  m.def(
      "load_model_file", [](const std::string& path) { return model_summary(load_model_file(path)); },
      py::arg("path"));
  m.def("check_model", &diagnostics_of, py::arg("path"),
        "Diagnostics (file:line:col: severity: message) for a model file; empty when clean.");
  m.def("run_model", &run_model, py::arg("path"), py::arg("calctime") = std::nullopt,
        py::arg("max_steps") = std::nullopt, py::arg("threads") = 0);

  m.def(
      "soil_properties",
      [](const std::string& model, double rho0, double freq) {
        const SoilProperties p = soil_model_properties(parse_soil_model(model), rho0, freq);
        return py::make_tuple(p.sigma, p.eps_r);
      },
      py::arg("model"), py::arg("rho0"), py::arg("freq"), "(sigma S/m, eps_r) of a soil model.");

  m.def(
      "fit_debye_model",
      [](const std::string& model, double rho0, double f_min, double f_max, int points, int poles,
         std::uint64_t seed) {
        const SoilSampleSet s = soil_model_sweep(parse_soil_model(model), rho0, f_min, f_max, points);
        const DebyeFit fit = fit_debye(s, poles, seed);
        py::list pl;
        for (const auto& p : fit.poles) pl.append(py::make_tuple(p.delta_eps, p.tau));
        py::dict d;
        d["sigma0"] = fit.sigma0;
        d["eps_inf"] = fit.eps_inf;
        d["poles"] = pl;
        d["residual"] = fit.residual;
        return d;
      },
      py::arg("model"), py::arg("rho0"), py::arg("f_min") = 100.0, py::arg("f_max") = 4e6,
      py::arg("points") = 60, py::arg("poles") = 4, py::arg("seed") = 1);

  m.def(
      "apparent_resistivity_layered",
      [](const std::vector<std::pair<double, double>>& layers, const std::string& kind, double a, double n,
         const std::vector<double>& electrodes) {
        LayeredEarth earth;
        for (const auto& [rho, h] : layers) earth.layers.push_back({rho, h});
        return apparent_resistivity_layered(earth, array_from(kind, a, n, electrodes));
      },
      py::arg("layers"), py::arg("array") = "wenner", py::arg("a") = 0.0, py::arg("n") = 1.0,
      py::arg("electrodes") = std::vector<double>{}, "layers: [(rho, thickness), ...], top first.");

  m.def(
      "depth_of_investigation",
      [](const std::string& kind, double a, double n, const std::string& method) {
        return depth_of_investigation(array_from(kind, a, n, {}), parse_doi_method(method));
      },
      py::arg("array") = "dipole_dipole", py::arg("a") = 1.0, py::arg("n") = 1.0, py::arg("method") = "barker");

  m.def(
      "evaluate_breakdown",
      [](const std::vector<double>& v, double dt, const std::string& params_json) {
        return evaluate_breakdown(v, dt, parse_breakdown_model(params_json));
      },
      py::arg("v"), py::arg("dt"), py::arg("params_json"),
      "Breakdown time in seconds, or None when the gap holds.");
}
