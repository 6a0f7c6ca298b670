#pragma once

// Drive waveforms, gap sources and lumped loads.

#include <span>
#include <string>
#include <vector>

#include "surge/grid.hpp"

namespace surge {

// i0 / eta * x^n / (1 + x^n) * exp(-t / tau2),  x = t / tau1
struct HeidlerTerm {
  double i0 = 1;
  double tau1 = 0;  // s
  double tau2 = 0;  // s
  double n = 2;
};

// Peak-correction factor exp(-(tau1/tau2) (n tau2/tau1)^(1/n)).
double heidler_eta(const HeidlerTerm& term);
void check_heidler(const HeidlerTerm& term);
// Sum of Heidler terms; 0 for t < 0.
double heidler_eval(std::span<const HeidlerTerm> terms, double t);

struct Waveform {
  enum class Kind { heidler_sum, sampled };
  std::string name;
  Kind kind = Kind::sampled;
  std::vector<HeidlerTerm> terms;
  double sample_dt = 0;
  std::vector<double> values;
};

void check_waveform(const Waveform& w);
// Linear interpolation for sampled data (last value held past the end,
// first value before t = 0), Heidler sum otherwise.
double waveform_sample(const Waveform& w, double t);

enum class SourceKind { current, voltage, hard_e, soft_e };

struct Source {
  SourceKind kind = SourceKind::current;
  EdgeRef edge;
  double r_internal = 0;  // ohm, 0 = ideal
  int waveform = -1;
};

enum class LumpedKind { resistor, capacitor };

struct LumpedElement {
  LumpedKind kind = LumpedKind::resistor;
  EdgeRef edge;
  double value = 0;  // ohm or farad
};

// Folds resistor / capacitor loads and internal resistances of non-ideal
// sources into the edge material so the regular semi-implicit update
// carries them.
void load_lumped(MaterialMap& map, std::span<const Source> sources,
                 std::span<const LumpedElement> lumped);

// Current-like drive evaluated at the half step t_half (current sources,
// Norton equivalents of resistive voltage sources) and additive soft E
// sources at t_next.
void inject_sources(FieldSet& f, const UpdateCoefficients& c, std::span<const Source> sources,
                    std::span<const Waveform> waves, double t_half, double t_next);
// Hard E assignment and ideal voltage sources at t_next.
void impose_sources(FieldSet& f, const Lattice& lat, std::span<const Source> sources,
                    std::span<const Waveform> waves, double t_next);

// Both phases, in order.
void apply_sources(FieldSet& f, const UpdateCoefficients& c, std::span<const Source> sources,
                   std::span<const Waveform> waves, double t, double dt);

}  // namespace surge
