#pragma once

// Plain-text model language: one command per line,
//   keyword ( arg, arg, ... )      # comment
// Arguments are numbers, identifiers or bracketed number lists.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surge/cpml.hpp"
#include "surge/debye.hpp"
#include "surge/errors.hpp"
#include "surge/excitation.hpp"
#include "surge/grid.hpp"
#include "surge/probes.hpp"
#include "surge/simulation.hpp"
#include "surge/wires.hpp"

namespace surge {

struct Value {
  enum class Kind { number, identifier, list, text };
  Kind kind = Kind::number;
  double number = 0;
  std::string text;  // identifier, or raw contents of a non-numeric bracket
  std::vector<double> list;
  int column = 0;
};

struct Command {
  std::string keyword;
  std::vector<Value> args;
  int line = 0;
  int column = 0;
};

struct ParseResult {
  std::vector<Command> commands;
  std::vector<Diagnostic> diagnostics;
};

ParseResult parse_model_text(std::string_view text);

struct ModelBlock {
  Box box;
  double eps_r = 1;
  double sigma = 0;
  std::string debye;  // empty when non-dispersive
  int line = 0;
};

struct ModelSource {
  enum class Kind { current, voltage, hard_e, soft_e, resistor, capacitor };
  Kind kind = Kind::current;
  Vec3 start, end;
  double value = 0;      // internal resistance, or R / C for lumped kinds
  std::string function;  // empty for lumped kinds
  int line = 0;
};

struct ModelProbe {
  ProbeKind kind = ProbeKind::current;
  Vec3 start, end;
  std::string name;
  int line = 0;
};

struct ModelDebye {
  std::string name;
  std::vector<DebyePole> poles;
  int line = 0;
};

struct ModelFunction {
  Waveform wave;
  int line = 0;
};

struct Model {
  Vec3 extent;  // m
  GridSpec grid;
  double calctime = 0;
  double output_interval = 0;
  double cfl = 0.99;
  bool absorbing = true;
  CpmlParams cpml;
  std::vector<ModelBlock> blocks;
  std::vector<ModelDebye> debye;
  std::vector<WireSegment> wires;
  std::vector<ModelSource> sources;
  std::vector<ModelProbe> probes;
  std::vector<ModelFunction> functions;
  std::vector<Diagnostic> warnings;

  int pml_cells() const;
  long record_every() const;
};

struct ModelOptions {
  double cfl = 0.99;
};

// Cross-checks the commands; throws ValidationError listing every problem.
Model validate_model(const std::vector<Command>& commands, const ModelOptions& opt = {});

// parse + validate. Parse diagnostics are reported as a ValidationError.
Model load_model(std::string_view text, const ModelOptions& opt = {});
Model load_model_file(const std::string& path, const ModelOptions& opt = {});

// Canonical command text; load_model(print_model(m)) reproduces m.
std::string print_model(const Model& m);

SimulationInput build_simulation_input(const Model& m);

}  // namespace surge
