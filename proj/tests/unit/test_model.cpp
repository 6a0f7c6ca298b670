#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "surge/errors.hpp"
#include "surge/model.hpp"

using namespace surge;

namespace {

std::string model_path(const std::string& name) { return std::string(SURGE_SOURCE_DIR) + "/models/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall =
    "volume (1, 1, 1, 0.1)\n"
    "calctime (1e-7)\n"
    "output (1e-9)\n"
    "abc (pec)\n";

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
  try {
    load_model(text);
  } catch (const ValidationError& e) {
    return e.diagnostics();
  }
  return {};
}

bool mentions(const std::vector<Diagnostic>& d, const std::string& what, int line = -1) {
  for (const auto& x : d)
    if (x.message.find(what) != std::string::npos && (line < 0 || x.line == line)) return true;
  return false;
}

}  // namespace

TEST_CASE("reference listings parse into every command") {
  const ParseResult a = parse_model_text(slurp(model_path("electrode_measured.model")));
  CHECK(a.diagnostics.empty());
  CHECK(a.commands.size() == 16);
  const ParseResult b = parse_model_text(slurp(model_path("four_electrode_legacy.model")));
  CHECK(b.diagnostics.empty());
  CHECK(b.commands.size() == 22);
  CHECK(a.commands[0].keyword == "volume");
  CHECK(a.commands[0].args[3].number == 0.125);
  CHECK(a.commands.back().args[3].kind == Value::Kind::text);
}

TEST_CASE("validated grids") {
  const Model m3 = load_model_file(model_path("electrode_step.model"));
  CHECK(m3.grid.nx == 80);
  CHECK(m3.grid.ny == 40);
  CHECK(m3.grid.nz == 56);
  CHECK(m3.pml_cells() == 10);
  CHECK(m3.wires.size() == 6);
  const Model m8 = load_model_file(model_path("four_electrode_legacy.model"));
  CHECK(m8.grid.nx == 100);
  CHECK(m8.grid.ny == 100);
  CHECK(m8.grid.nz == 80);
  CHECK(m8.debye.size() == 3);
  // The legacy heidler layout keeps (tau1, tau2, i0, n) and warns about the rest.
  REQUIRE(m8.functions.size() == 1);
  const HeidlerTerm& t = m8.functions[0].wave.terms.at(0);
  CHECK(t.tau1 == 3.7e-7);
  CHECK(t.tau2 == 1.4e-5);
  CHECK(t.i0 == 1);
  CHECK(t.n == 10);
  CHECK(mentions(m8.warnings, "ignored"));
}

TEST_CASE("the measured-current placeholder is rejected at validation") {
  const auto d = diagnostics_of(slurp(model_path("electrode_measured.model")));
  CHECK(mentions(d, "samples must be a bracketed list", 16));
}

TEST_CASE("arity diagnostics name the command and line") {
  const auto d = diagnostics_of("volume (10, 5)\n");
  REQUIRE(!d.empty());
  CHECK(d[0].line == 1);
  CHECK(d[0].message.find("volume") != std::string::npos);
  CHECK(d[0].message.find("expects 4") != std::string::npos);
  CHECK(format_diagnostic(d[0], "m.model").rfind("m.model:1:1: error: volume", 0) == 0);
}

TEST_CASE("syntax errors") {
  CHECK(mentions(diagnostics_of(std::string(kSmall) + "frobnicate (1)\n"), "unknown keyword 'frobnicate'", 5));
  CHECK(mentions(diagnostics_of(std::string(kSmall) + "block 0, 0)\n"), "expected '('", 5));
  CHECK(mentions(diagnostics_of(std::string(kSmall) + "calctime (1e-7) x\n"), "after ')'", 5));
  CHECK(mentions(diagnostics_of(std::string(kSmall) + "function (f, custom, 1e-9, [0, 1)\n"), "unterminated", 5));
  CHECK(mentions(diagnostics_of(std::string(kSmall) + "output (1e-9x)\n"), "malformed number", 5));
}

TEST_CASE("cross-reference errors") {
  const std::string base = kSmall;
  CHECK(mentions(diagnostics_of(base + "block (0, 0, 0, 1, 1, 0.5, 10, 0.01, deb9)\n"),
                 "undefined debye medium 'deb9'", 5));
  CHECK(mentions(diagnostics_of(base + "volume (1, 1, 1, 0.1)\n"), "duplicate volume", 5));
  CHECK(mentions(diagnostics_of("calctime (1e-7)\noutput (1e-9)\nabc (pec)\n"), "missing volume"));
  CHECK(mentions(diagnostics_of(base + "source (current, 0.5, 0.5, 0.2, 0.5, 0.5, 0.3, 0, nofn)\n"),
                 "undefined function 'nofn'", 5));
  CHECK(mentions(diagnostics_of(base + "debye (d, 1, 1e-6)\ndebye (d, 2, 1e-6)\n"), "already defined", 6));
  CHECK(mentions(diagnostics_of(base + "wire (oblique, 0.2, 0.2, 0.2, 0.2, 0.2, 0.5, 0.002)\n"),
                 "oblique", 5));
  CHECK(mentions(diagnostics_of(base + "abc (upml)\n"), "duplicate abc"));
  CHECK(mentions(diagnostics_of("volume (1, 1, 1, 0.1)\ncalctime (1e-7)\noutput (1e-9)\nabc (upml)\n"),
                 "upml is not supported", 4));
  CHECK(mentions(diagnostics_of(base + "block (0, 0, 0, 2, 1, 0.5, 10, 0.01)\n"), "outside the volume", 5));
  CHECK(mentions(diagnostics_of(base + "function (f, custom, 1e-9, [0, 1])\n"
                                       "source (current, 0.5, 0.5, 0.2, 0.5, 0.5, 0.4, 0, f)\n"),
                 "single cell edge", 6));
  CHECK(mentions(diagnostics_of("volume (1.05, 1, 1, 0.1)\ncalctime (1e-7)\noutput (1e-9)\nabc (pec)\n"),
                 "whole number of cells", 1));
}

TEST_CASE("every problem is reported in one pass") {
  const auto d = diagnostics_of(std::string(kSmall) +
                                "block (0, 0, 0, 1, 1, 0.5, 10, 0.01, deb9)\n"
                                "bogus (1)\n"
                                "block (0, 0, 0, 1, 1, 0.5, 0.5, 0.01)\n");
  CHECK(mentions(d, "deb9", 5));
  CHECK(mentions(d, "bogus", 6));
  CHECK(mentions(d, "permittivity", 7));
}

TEST_CASE("CFL number outside (0, 1] is rejected") {
  const std::string text = slurp(model_path("electrode_step.model"));
  CHECK_THROWS_AS(load_model(text, ModelOptions{1.01}), ValidationError);
  CHECK_THROWS_AS(load_model(text, ModelOptions{0}), ValidationError);
  CHECK_NOTHROW(load_model(text, ModelOptions{1.0}));
}

TEST_CASE("time step divides the output interval") {
  const Model m = load_model_file(model_path("electrode_step.model"));
  CHECK(m.grid.dt <= courant_dt(0.125, 0.99) * std::sqrt(wire_stability_factor(m.wires, 0.125)));
  const long k = m.record_every();
  CHECK(std::abs(k * m.grid.dt - 1e-8) < 1e-12 * 1e-8);
  // 15 us at 10 ns gives 1501 rows including t = 0.
  CHECK(m.grid.n_steps / k + 1 == 1501);
  CHECK(m.grid.n_steps % k == 0);
}

TEST_CASE("print and reload round trip") {
  for (const char* name : {"electrode_step.model", "four_electrode.model", "four_electrode_legacy.model"}) {
    const Model a = load_model_file(model_path(name));
    const std::string text = print_model(a);
    const Model b = load_model(text);
    CHECK(print_model(b) == text);
    CHECK(b.grid.nx == a.grid.nx);
    CHECK(b.grid.dt == a.grid.dt);
    CHECK(b.grid.n_steps == a.grid.n_steps);
    CHECK(b.blocks.size() == a.blocks.size());
    CHECK(b.wires.size() == a.wires.size());
    CHECK(b.probes.size() == a.probes.size());
  }
}

TEST_CASE("assembled input matches the model") {
  const Model m = load_model_file(model_path("four_electrode.model"));
  const SimulationInput in = build_simulation_input(m);
  CHECK(in.media.size() == 3);
  CHECK(in.sources.size() == 1);
  CHECK(in.probes.size() == 2);
  CHECK(in.probes[0].name == "current0");
  CHECK(in.probes[1].name == "voltage0");
  CHECK(in.probes[1].edges.size() == 1);
  const int p = m.pml_cells();
  CHECK(in.sources[0].edge.axis == 0);
  CHECK(in.sources[0].edge.lower == Node{29 + p, 20 + p, 63 + p});
  CHECK(in.materials.lattice.nx == 100 + 2 * p);
}

TEST_CASE("empty input is invalid") {
  const auto d = diagnostics_of("# nothing here\n\n");
  CHECK(mentions(d, "missing volume"));
  CHECK(mentions(d, "missing calctime"));
}
