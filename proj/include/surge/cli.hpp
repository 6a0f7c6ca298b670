#pragma once

// Subcommand implementations behind the surgefdtd executable. Each returns
// the process exit code: 0 ok, 1 I/O failure, 2 invalid input, 3 the run
// produced non-finite fields.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "surge/soil.hpp"

namespace surge {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitInvalid = 2, kExitNonFinite = 3 };

int cmd_check(const std::string& model_path, std::ostream& err);

struct RunConfig {
  std::string model_path;
  std::string output_path;
  int threads = 0;
  std::optional<double> cfl;
  std::uint64_t seed = 1;
  bool progress = false;
  std::optional<double> calctime;  // overrides the model's calctime
  std::optional<long> max_steps;
};

int cmd_run(const RunConfig& cfg, std::ostream& err);

struct FitConfig {
  std::string input_path;           // CSV freq,eps_real,eps_imag
  std::optional<std::string> model;  // or a soil model sweep
  double rho0 = 0;
  double f_min = 100, f_max = 4e6;
  int points = 60;
  std::optional<double> sigma_dc;
  int poles = 4;
  std::uint64_t seed = 1;
  PsoSettings pso;
};

int cmd_fit_debye(const FitConfig& cfg, std::ostream& out, std::ostream& err);

struct SoilModelConfig {
  std::string model;
  double rho0 = 0;
  std::vector<double> freqs;
  std::optional<double> f_min, f_max;
  int points = 20;
};

int cmd_soil_model(const SoilModelConfig& cfg, std::ostream& out, std::ostream& err);

struct ArrayConfig {
  std::string kind = "wenner";
  double a = 0, n = 1;
  std::vector<double> electrodes;  // xa,ya,xb,yb,xm,ym,xn,yn for general4
};

ElectrodeArray make_array(const ArrayConfig& cfg);

struct ApparentConfig {
  std::string input_path;
  std::string voltage_column = "voltage0";
  std::string current_column = "current0";
  ArrayConfig array;
  std::vector<double> freqs;
};

int cmd_apparent(const ApparentConfig& cfg, std::ostream& out, std::ostream& err);

struct DoiConfig {
  ArrayConfig array{"dipole_dipole", 1, 1, {}};
  std::string method = "barker";
};

int cmd_doi(const DoiConfig& cfg, std::ostream& out, std::ostream& err);

struct BreakdownConfig {
  std::string input_path;
  std::string column = "voltage0";
  std::string params_path;
};

int cmd_breakdown(const BreakdownConfig& cfg, std::ostream& out, std::ostream& err);

// Probe CSV: header "time,<names>" and numeric rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;
};
Table read_csv_table(const std::string& path);

int cli_main(int argc, char** argv);

}  // namespace surge
