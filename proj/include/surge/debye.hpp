#pragma once

// Multi-pole Debye media, advanced with an auxiliary differential equation
// per pole:  dJ_p/dt + J_p / tau_p = (delta_eps_p eps0 / tau_p) dE/dt,
// discretised with the trapezoidal rule. Coupled to Ampere's law as
//   eps0 eps_inf dE/dt + sigma0 E + sum_p J_p = curl H.

#include <complex>
#include <string>
#include <vector>

#include "surge/grid.hpp"

namespace surge {

inline constexpr int kMaxDebyePoles = 4;

struct DebyePole {
  double delta_eps = 0;
  double tau = 0;  // s
};

struct DebyeMedium {
  std::string name;
  double eps_inf = 1;
  double sigma0 = 0;  // S/m
  std::vector<DebyePole> poles;
};

// Throws ParameterError when a medium invariant fails.
void check_medium(const DebyeMedium& m);

// eps_inf + sum dEps/(1 + j w tau) - j sigma0/(w eps0), e^{+jwt} convention.
std::complex<double> debye_complex_permittivity(const DebyeMedium& m, double freq);

class AdeState {
 public:
  // Collects every edge of `map` tagged with a medium that has poles.
  AdeState(const MaterialMap& map, std::vector<DebyeMedium> media, double dt);

  // Per-medium permittivity increment to hand to build_coefficients.
  const std::vector<double>& eps_extra() const { return eps_extra_; }
  std::size_t edge_count() const;

  // save() before the curl update, update() after it (and after soft sources).
  void save(const FieldSet& f);
  void update(FieldSet& f, const UpdateCoefficients& c);

  double max_abs_current() const;

 private:
  struct PoleCoeffs {
    int n = 0;
    double k[kMaxDebyePoles] = {}, g[kMaxDebyePoles] = {}, h[kMaxDebyePoles] = {};
  };
  struct EdgeList {
    std::vector<std::size_t> index;
    std::vector<std::int16_t> medium;
    std::vector<double> e_old;
    std::vector<double> j;  // kMaxDebyePoles per edge
  };

  std::vector<DebyeMedium> media_;
  std::vector<PoleCoeffs> coeffs_;
  std::vector<double> eps_extra_;
  std::array<EdgeList, 3> edges_;
};

// One dispersive E half-step: save, curl update, pole update.
void step_debye_e(FieldSet& f, const UpdateCoefficients& c, AdeState& ade,
                  CpmlState* cpml = nullptr);

}  // namespace surge
