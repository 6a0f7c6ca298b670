#include "surge/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "surge/breakdown.hpp"
#include "surge/errors.hpp"
#include "surge/model.hpp"
#include "surge/simulation.hpp"

namespace surge {

namespace {

void print_diagnostics(std::ostream& err, const std::vector<Diagnostic>& diags, const std::string& file) {
  for (const auto& d : diags) err << format_diagnostic(d, file) << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::vector<double> Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> v;
      v.reserve(rows.size());
      for (const auto& r : rows) v.push_back(r[c]);
      return v;
    }
  throw ParameterError("no column '" + name + "'");
}

Table read_csv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  Table t;
  std::string line;
  int ln = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw ParameterError(path + ":" + std::to_string(ln) + ": wrong number of fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0;
      const char* b = c.data();
      while (*b == ' ') ++b;
      auto r = std::from_chars(b, c.data() + c.size(), v);
      if (r.ec != std::errc()) throw ParameterError(path + ":" + std::to_string(ln) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw ParameterError(path + ": empty table");
  return t;
}

int cmd_check(const std::string& model_path, std::ostream& err) {
  std::string text;
  try {
    text = read_file(model_path);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  try {
    Model m = load_model(text);
    print_diagnostics(err, m.warnings, model_path);
    build_simulation_input(m);
  } catch (const ValidationError& e) {
    print_diagnostics(err, e.diagnostics(), model_path);
    return kExitInvalid;
  } catch (const ParameterError& e) {
    err << model_path << ": error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

int cmd_run(const RunConfig& cfg, std::ostream& err) {
  if (cfg.threads < 0) {
    err << "error: --threads must be >= 0\n";
    return kExitInvalid;
  }
  std::string text;
  try {
    text = read_file(cfg.model_path);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  ModelOptions opt;
  if (cfg.cfl) opt.cfl = *cfg.cfl;
  Model m;
  std::unique_ptr<Simulation> sim;
  try {
    m = load_model(text, opt);
    print_diagnostics(err, m.warnings, cfg.model_path);
    if (cfg.calctime) {
      if (!(*cfg.calctime > 0)) throw ParameterError("--calctime must be positive");
      m.calctime = *cfg.calctime;
      m.grid.n_steps = long(std::ceil(m.calctime / m.grid.dt - 1e-9));
    }
    set_thread_count(cfg.threads);
    sim = std::make_unique<Simulation>(build_simulation_input(m));
  } catch (const ValidationError& e) {
    print_diagnostics(err, e.diagnostics(), cfg.model_path);
    return kExitInvalid;
  } catch (const ParameterError& e) {
    err << cfg.model_path << ": error: " << e.what() << '\n';
    return kExitInvalid;
  }
  long steps = m.grid.n_steps;
  if (cfg.max_steps) steps = std::min(steps, *cfg.max_steps);
  std::unique_ptr<CsvWriter> csv;
  try {
    csv = std::make_unique<CsvWriter>(cfg.output_path, sim->probe_names());
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  std::function<void(double)> progress;
  if (cfg.progress)
    progress = [&](double frac) { err << fmt("progress %5.1f%%", frac * 100) << '\n'; };
  const RunReport rep = run_simulation(
      *sim, steps, m.record_every(),
      [&](double t, const std::vector<double>& v) { csv->write_row(t, v); }, progress);
  if (rep.failed_step >= 0) {
    err << "error: non-finite field values at step " << rep.failed_step << '\n';
    return kExitNonFinite;
  }
  return kExitOk;
}

int cmd_fit_debye(const FitConfig& cfg, std::ostream& out, std::ostream& err) {
  SoilSampleSet s;
  try {
    if (cfg.model) {
      s = soil_model_sweep(parse_soil_model(*cfg.model), cfg.rho0, cfg.f_min, cfg.f_max, cfg.points);
    } else {
      const Table t = read_csv_table(cfg.input_path);
      if (t.columns.size() < 3) throw ParameterError("expected columns freq,eps_real,eps_imag");
      for (const auto& r : t.rows) s.points.push_back({r[0], {r[1], r[2]}});
    }
    if (cfg.sigma_dc) s.sigma_dc = *cfg.sigma_dc;
  } catch (const std::ios_base::failure& e) {
    err << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  DebyeFit fit;
  try {
    fit = fit_debye(s, cfg.poles, cfg.seed, cfg.pso);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  out << "sigma0 = " << fmt("%.3f", fit.sigma0 * 1e3) << " mS/m\n";
  out << "rho0 = " << (fit.sigma0 > 0 ? fmt("%.2f", 1 / fit.sigma0) : std::string("inf")) << " ohm m\n";
  out << "eps_inf = " << fmt("%.3f", fit.eps_inf) << '\n';
  for (std::size_t p = 0; p < fit.poles.size(); ++p) {
    out << "delta_eps" << p + 1 << " = " << fmt("%.3f", fit.poles[p].delta_eps) << '\n';
    out << "tau" << p + 1 << " = " << fmt("%.4e", fit.poles[p].tau) << " s\n";
  }
  out << "residual = " << fmt("%.3f", fit.residual * 100) << " %\n";
  out << "debye (fit";
  for (const auto& p : fit.poles) out << ", " << fmt("%.6g", p.delta_eps) << ", " << fmt("%.6g", p.tau);
  out << ")\n";
  if (fit.above_ceiling)
    err << "warning: residual " << fmt("%.3g", fit.residual) << " exceeds the ceiling "
        << fmt("%.3g", cfg.pso.residual_ceiling) << '\n';
  return kExitOk;
}

int cmd_soil_model(const SoilModelConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const SoilModel model = parse_soil_model(cfg.model);
    std::vector<double> freqs = cfg.freqs;
    if (cfg.f_min || cfg.f_max) {
      if (!cfg.f_min || !cfg.f_max || cfg.points < 2)
        throw ParameterError("a sweep needs --fmin, --fmax and --points >= 2");
      for (const auto& p : soil_model_sweep(model, cfg.rho0, *cfg.f_min, *cfg.f_max, cfg.points).points)
        freqs.push_back(p.freq);
    }
    if (freqs.empty()) throw ParameterError("give --freq or a sweep");
    std::string text = "freq,sigma,eps_r\n";
    for (double f : freqs) {
      const SoilProperties p = soil_model_properties(model, cfg.rho0, f);
      text += fmt("%.9e", f) + "," + fmt("%.9e", p.sigma) + "," + fmt("%.9e", p.eps_r) + "\n";
    }
    out << text;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

ElectrodeArray make_array(const ArrayConfig& cfg) {
  if (cfg.kind == "wenner") return ElectrodeArray::wenner(cfg.a);
  if (cfg.kind == "dipole_dipole" || cfg.kind == "dipole-dipole")
    return ElectrodeArray::dipole_dipole(cfg.a, cfg.n);
  if (cfg.kind == "general4") {
    const auto& e = cfg.electrodes;
    if (e.size() != 8) throw ParameterError("general4 needs 8 electrode coordinates xa,ya,xb,yb,xm,ym,xn,yn");
    return ElectrodeArray::general({e[0], e[1]}, {e[2], e[3]}, {e[4], e[5]}, {e[6], e[7]});
  }
  throw ParameterError("unknown array kind '" + cfg.kind + "'");
}

int cmd_apparent(const ApparentConfig& cfg, std::ostream& out, std::ostream& err) {
  Table t;
  try {
    t = read_csv_table(cfg.input_path);
  } catch (const std::ios_base::failure& e) {
    err << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    const ElectrodeArray arr = make_array(cfg.array);
    const std::vector<double> time = t.column("time");
    if (time.size() < 2) throw ParameterError("need at least two samples");
    const double dt = time[1] - time[0];
    const auto rows = apparent_from_vi(t.column(cfg.voltage_column), t.column(cfg.current_column), arr,
                                       dt, cfg.freqs);
    std::string text = "freq,rho_a,eps_a,valid\n";
    for (const auto& r : rows)
      text += fmt("%.9e", r.freq) + "," + fmt("%.9e", r.rho_a) + "," + fmt("%.9e", r.eps_a) + "," +
              (r.valid ? "1" : "0") + "\n";
    out << text;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

int cmd_doi(const DoiConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const double z = depth_of_investigation(make_array(cfg.array), parse_doi_method(cfg.method));
    out << fmt("%.6g", z) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

int cmd_breakdown(const BreakdownConfig& cfg, std::ostream& out, std::ostream& err) {
  Table t;
  std::string params;
  try {
    t = read_csv_table(cfg.input_path);
    params = read_file(cfg.params_path);
  } catch (const std::ios_base::failure& e) {
    err << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    const BreakdownModel m = parse_breakdown_model(params);
    const std::vector<double> time = t.column("time");
    if (time.size() < 2) throw ParameterError("need at least two samples");
    const std::vector<double> v = t.column(cfg.column);
    const auto tb = evaluate_breakdown(v, time[1] - time[0], m);
    if (tb)
      out << "breakdown at " << fmt("%.9e", time[0] + *tb) << " s\n";
    else
      out << "no breakdown\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

namespace {

void add_array_options(CLI::App* sub, ArrayConfig& a) {
  sub->add_option("--array", a.kind, "wenner, dipole_dipole or general4")->capture_default_str();
  sub->add_option("--a", a.a, "electrode spacing, m");
  sub->add_option("--n", a.n, "dipole separation factor")->capture_default_str();
  sub->add_option("--electrodes", a.electrodes, "xa,ya,xb,yb,xm,ym,xn,yn for general4")->delimiter(',');
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"FDTD transient simulator for grounding and lightning studies"};
  app.require_subcommand(1);

  std::string check_path;
  auto* check = app.add_subcommand("check", "validate a model file");
  check->add_option("model", check_path)->required();

  RunConfig run_cfg;
  std::optional<double> cfl, calctime;
  std::optional<long> max_steps;
  auto* run = app.add_subcommand("run", "run a model and write probe CSV");
  run->add_option("model", run_cfg.model_path)->required();
  run->add_option("--output", run_cfg.output_path, "CSV output path")->required();
  run->add_option("--threads", run_cfg.threads, "worker threads, 0 = auto")->capture_default_str();
  run->add_option("--cfl", cfl, "Courant number in (0, 1]");
  run->add_option("--seed", run_cfg.seed, "unused by the solver, kept for scripting")->capture_default_str();
  run->add_flag("--progress", run_cfg.progress, "progress lines on standard error");
  run->add_option("--calctime", calctime, "override the simulated time, s");
  run->add_option("--max-steps", max_steps, "stop after this many steps");

  FitConfig fit_cfg;
  std::optional<std::string> fit_model;
  std::optional<double> sigma_dc;
  auto* fit = app.add_subcommand("fit-debye", "fit Debye poles to soil samples");
  fit->add_option("--input", fit_cfg.input_path, "CSV freq,eps_real,eps_imag");
  fit->add_option("--model", fit_model, "messier, alipio_visacro or portela sweep instead of --input");
  fit->add_option("--rho0", fit_cfg.rho0, "static resistivity for --model, ohm m");
  fit->add_option("--fmin", fit_cfg.f_min, "sweep start, Hz")->capture_default_str();
  fit->add_option("--fmax", fit_cfg.f_max, "sweep end, Hz")->capture_default_str();
  fit->add_option("--points", fit_cfg.points, "sweep points")->capture_default_str();
  fit->add_option("--sigma-dc", sigma_dc, "fix the static conductivity, S/m");
  fit->add_option("--poles", fit_cfg.poles, "number of poles (1-4)")->capture_default_str();
  fit->add_option("--seed", fit_cfg.seed, "swarm seed")->capture_default_str();
  fit->add_option("--particles", fit_cfg.pso.particles)->capture_default_str();
  fit->add_option("--iterations", fit_cfg.pso.iterations)->capture_default_str();
  fit->add_option("--inertia", fit_cfg.pso.inertia)->capture_default_str();
  fit->add_option("--cognitive", fit_cfg.pso.cognitive)->capture_default_str();
  fit->add_option("--social", fit_cfg.pso.social)->capture_default_str();
  fit->add_option("--tau-min", fit_cfg.pso.tau_min)->capture_default_str();
  fit->add_option("--tau-max", fit_cfg.pso.tau_max)->capture_default_str();
  fit->add_option("--max-residual", fit_cfg.pso.residual_ceiling)->capture_default_str();

  SoilModelConfig soil_cfg;
  std::optional<double> fmin, fmax;
  auto* soil = app.add_subcommand("soil-model", "evaluate a frequency-dependent soil model");
  soil->add_option("model", soil_cfg.model, "messier, alipio_visacro or portela")->required();
  soil->add_option("--rho0", soil_cfg.rho0, "static resistivity, ohm m")->required();
  soil->add_option("--freq", soil_cfg.freqs, "frequency, Hz (repeatable)");
  soil->add_option("--fmin", fmin);
  soil->add_option("--fmax", fmax);
  soil->add_option("--points", soil_cfg.points)->capture_default_str();

  ApparentConfig app_cfg;
  auto* apparent = app.add_subcommand("apparent", "apparent resistivity and permittivity from probe CSV");
  apparent->add_option("--input", app_cfg.input_path, "probe CSV")->required();
  apparent->add_option("--voltage", app_cfg.voltage_column)->capture_default_str();
  apparent->add_option("--current", app_cfg.current_column)->capture_default_str();
  apparent->add_option("--freq", app_cfg.freqs, "frequency, Hz (repeatable); default all DFT bins");
  add_array_options(apparent, app_cfg.array);

  DoiConfig doi_cfg;
  auto* doi = app.add_subcommand("doi", "depth of investigation of an electrode array");
  doi->add_option("--method", doi_cfg.method, "roy_apparao or barker")->capture_default_str();
  add_array_options(doi, doi_cfg.array);

  BreakdownConfig bd_cfg;
  auto* bd = app.add_subcommand("breakdown", "insulation breakdown on a probe voltage");
  bd->add_option("--input", bd_cfg.input_path, "probe CSV")->required();
  bd->add_option("--column", bd_cfg.column)->capture_default_str();
  bd->add_option("--params", bd_cfg.params_path, "JSON model parameters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (*check) return cmd_check(check_path, std::cerr);
  if (*run) {
    run_cfg.cfl = cfl;
    run_cfg.calctime = calctime;
    run_cfg.max_steps = max_steps;
    return cmd_run(run_cfg, std::cerr);
  }
  if (*fit) {
    fit_cfg.model = fit_model;
    fit_cfg.sigma_dc = sigma_dc;
    if (!fit_model && fit_cfg.input_path.empty()) {
      std::cerr << "error: give --input or --model\n" << fit->help();
      return kExitInvalid;
    }
    return cmd_fit_debye(fit_cfg, std::cout, std::cerr);
  }
  if (*soil) {
    soil_cfg.f_min = fmin;
    soil_cfg.f_max = fmax;
    return cmd_soil_model(soil_cfg, std::cout, std::cerr);
  }
  if (*apparent) return cmd_apparent(app_cfg, std::cout, std::cerr);
  if (*doi) return cmd_doi(doi_cfg, std::cout, std::cerr);
  if (*bd) return cmd_breakdown(bd_cfg, std::cout, std::cerr);
  return kExitInvalid;
}

}  // namespace surge
