#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "surge/cli.hpp"
#include "surge/model.hpp"
#include "surge/soil.hpp"

using namespace surge;
namespace fs = std::filesystem;

namespace {

std::string model_path(const std::string& name) { return std::string(SURGE_SOURCE_DIR) + "/models/" + name; }

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "surge_cli_test";
  fs::create_directories(d);
  return d;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("check exit codes") {
  std::ostringstream err;
  CHECK(cmd_check(model_path("electrode_step.model"), err) == kExitOk);
  CHECK(cmd_check(model_path("four_electrode.model"), err) == kExitOk);
  CHECK(err.str().empty());
  const std::string bad = write("dangling.model",
                                "volume (1, 1, 1, 0.1)\ncalctime (1e-7)\noutput (1e-9)\nabc (pec)\n"
                                "block (0, 0, 0, 1, 1, 0.5, 10, 0.01, deb9)\n");
  std::ostringstream e2;
  CHECK(cmd_check(bad, e2) == kExitInvalid);
  CHECK(e2.str().find(bad + ":5:") != std::string::npos);
  CHECK(e2.str().find("deb9") != std::string::npos);
  std::ostringstream e3;
  CHECK(cmd_check((scratch() / "missing.model").string(), e3) == kExitIo);
  std::ostringstream e4;
  CHECK(cmd_check(write("empty.model", ""), e4) == kExitInvalid);
  CHECK(cmd_check(model_path("electrode_measured.model"), e4) == kExitInvalid);
}

TEST_CASE("run writes the probe CSV") {
  RunConfig cfg;
  cfg.model_path = model_path("electrode_step.model");
  cfg.output_path = (scratch() / "run.csv").string();
  cfg.max_steps = 2 * load_model_file(cfg.model_path).record_every();
  cfg.threads = 1;
  std::ostringstream err;
  REQUIRE(cmd_run(cfg, err) == kExitOk);
  const Table t = read_csv_table(cfg.output_path);
  CHECK(t.columns == std::vector<std::string>{"time", "current0", "voltage0"});
  CHECK(slurp(cfg.output_path).rfind("time,current0,voltage0\n0.000000000e+00,", 0) == 0);
  // 10 ns rows; the step divides the interval.
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[1][0] == doctest::Approx(1e-8).epsilon(1e-9));
  for (const auto& r : t.rows)
    for (double v : r) CHECK(std::isfinite(v));

  RunConfig bad = cfg;
  bad.cfl = 1.5;
  CHECK(cmd_run(bad, err) == kExitInvalid);
  bad = cfg;
  bad.threads = -1;
  CHECK(cmd_run(bad, err) == kExitInvalid);
  bad = cfg;
  bad.output_path = "/nonexistent-dir/out.csv";
  CHECK(cmd_run(bad, err) == kExitIo);
}

TEST_CASE("fit-debye report") {
  FitConfig cfg;
  cfg.model = "messier";
  cfg.rho0 = 200;
  cfg.pso.iterations = 150;
  std::ostringstream out, err;
  REQUIRE(cmd_fit_debye(cfg, out, err) == kExitOk);
  const std::string s = out.str();
  CHECK(s.find("sigma0 = 5.000 mS/m") != std::string::npos);
  CHECK(s.find("rho0 = 200.00 ohm m") != std::string::npos);
  CHECK(s.find("tau4 = ") != std::string::npos);
  CHECK(s.find("debye (fit, ") != std::string::npos);

  FitConfig missing;
  missing.input_path = (scratch() / "none.csv").string();
  CHECK(cmd_fit_debye(missing, out, err) == kExitIo);
  FitConfig unknown;
  unknown.model = "clay";
  unknown.rho0 = 100;
  CHECK(cmd_fit_debye(unknown, out, err) == kExitInvalid);
}

TEST_CASE("soil-model output matches the library") {
  SoilModelConfig cfg;
  cfg.model = "alipio_visacro";
  cfg.rho0 = 1000;
  cfg.freqs = {1e3, 1e6};
  std::ostringstream out, err;
  REQUIRE(cmd_soil_model(cfg, out, err) == kExitOk);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "freq,sigma,eps_r");
  for (double f : cfg.freqs) {
    REQUIRE(std::getline(in, line));
    double ff = 0, sg = 0, er = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &ff, &sg, &er) == 3);
    const SoilProperties p = soil_model_properties(parse_soil_model("alipio_visacro"), 1000, f);
    CHECK(ff == doctest::Approx(f).epsilon(1e-8));
    CHECK(sg == doctest::Approx(p.sigma).epsilon(0.01));
    CHECK(er == doctest::Approx(p.eps_r).epsilon(0.01));
  }
  SoilModelConfig none;
  none.model = "messier";
  none.rho0 = 100;
  CHECK(cmd_soil_model(none, out, err) == kExitInvalid);
}

TEST_CASE("doi distinguishes the two methods") {
  std::ostringstream a, b, err;
  DoiConfig ra{{"dipole_dipole", 1, 1, {}}, "roy_apparao"};
  DoiConfig bk{{"dipole_dipole", 1, 1, {}}, "barker"};
  REQUIRE(cmd_doi(ra, a, err) == kExitOk);
  REQUIRE(cmd_doi(bk, b, err) == kExitOk);
  CHECK(std::stod(a.str()) == doctest::Approx(0.298081).epsilon(1e-5));
  CHECK(std::stod(b.str()) == doctest::Approx(0.415943).epsilon(1e-5));
  DoiConfig bad{{"schlumberger", 1, 1, {}}, "barker"};
  CHECK(cmd_doi(bad, a, err) == kExitInvalid);
}

TEST_CASE("apparent resistivity from a probe CSV") {
  // Constant V = 2 I: rho_a = k R with the Wenner factor 2 pi a.
  std::string csv = "time,voltage0,current0\n";
  for (int n = 0; n < 64; ++n) csv += num(n * 1e-6) + ",2,1\n";
  ApparentConfig cfg;
  cfg.input_path = write("vi.csv", csv);
  cfg.array = ArrayConfig{"wenner", 1.5, 1, {}};
  cfg.freqs = {0};
  std::ostringstream out, err;
  REQUIRE(cmd_apparent(cfg, out, err) == kExitOk);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "freq,rho_a,eps_a,valid");
  REQUIRE(std::getline(in, line));
  double f = 0, rho = 0, eps = 0;
  int valid = 0;
  REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &f, &rho, &eps, &valid) == 4);
  CHECK(rho == doctest::Approx(2 * M_PI * 1.5 * 2).epsilon(1e-9));
  CHECK(valid == 1);
  ApparentConfig wrong = cfg;
  wrong.voltage_column = "nope";
  CHECK(cmd_apparent(wrong, out, err) == kExitInvalid);
  ApparentConfig g = cfg;
  g.array = ArrayConfig{"general4", 0, 1, {1, 1, 2, 1}};
  CHECK(cmd_apparent(g, out, err) == kExitInvalid);
}

TEST_CASE("breakdown subcommand") {
  std::string csv = "time,voltage0\n";
  for (int n = 0; n <= 1200; ++n) csv += num(n * 1e-8) + "," + (n >= 100 ? "600000" : "0") + "\n";
  BreakdownConfig cfg;
  cfg.input_path = write("v.csv", csv);
  cfg.params_path = write("de.json", R"({"kind": "disruptive_effect", "v0": 300e3, "k": 1, "de_crit": 0.15})");
  std::ostringstream out, err;
  REQUIRE(cmd_breakdown(cfg, out, err) == kExitOk);
  double t = 0;
  REQUIRE(std::sscanf(out.str().c_str(), "breakdown at %lf s", &t) == 1);
  CHECK(std::abs(t - (1e-6 + 0.15 / 300e3)) <= 1.01e-8);
  std::ostringstream quiet;
  cfg.params_path = write("de2.json", R"({"kind": "disruptive_effect", "v0": 700e3, "k": 1, "de_crit": 0.15})");
  REQUIRE(cmd_breakdown(cfg, quiet, err) == kExitOk);
  CHECK(quiet.str() == "no breakdown\n");
  cfg.params_path = write("bad.json", "{oops");
  CHECK(cmd_breakdown(cfg, quiet, err) == kExitInvalid);
}

TEST_CASE("command line front end") {
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(int(argv.size()), argv.data());
  };
  CHECK(call({"surgefdtd", "check", model_path("electrode_step.model")}) == kExitOk);
  CHECK(call({"surgefdtd"}) == kExitInvalid);
  CHECK(call({"surgefdtd", "frobnicate"}) == kExitInvalid);
  CHECK(call({"surgefdtd", "doi", "--array", "wenner", "--a", "1"}) == kExitOk);
  CHECK(call({"surgefdtd", "run", model_path("electrode_step.model")}) == kExitInvalid);
}
