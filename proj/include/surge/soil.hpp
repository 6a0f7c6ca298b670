#pragma once

// Frequency-dependent soil models, Debye fitting, layered-earth apparent
// resistivity, array geometric factors and depth of investigation.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surge/debye.hpp"

namespace surge {

enum class SoilModel { messier, alipio_visacro, portela };

SoilModel parse_soil_model(const std::string& name);
const char* soil_model_name(SoilModel m);

struct SoilProperties {
  double sigma = 0;  // S/m
  double eps_r = 1;
};

struct SoilModelConstants {
  // Messier: eps = eps_inf (1 + sqrt(2 s0 / (w e0 eps_inf))),
  //          sigma = s0 (1 + sqrt(2 w e0 eps_inf / s0))
  double messier_eps_inf = 8;
  // Alipio-Visacro (s0 in mS/m): sigma = s0 + s0 h (f/1MHz)^g, h = a s0^b
  double av_gamma = 0.54;
  double av_h_scale = 1.26;
  double av_h_exp = -0.73;
  double av_eps_hf = 12;
  // Portela: sigma + j w eps = s0 + di (j f / 1MHz)^alpha
  double portela_alpha = 0.706;
  double portela_delta_i = 11.71e-3;  // S/m
};

SoilProperties soil_model_properties(SoilModel model, double rho0, double freq,
                                     const SoilModelConstants& k = {});

// eps_r - j sigma / (w eps0)
std::complex<double> complex_relative_permittivity(const SoilProperties& p, double freq);

struct SoilSample {
  double freq = 0;
  std::complex<double> eps;  // relative, conduction included
};

struct SoilSampleSet {
  std::vector<SoilSample> points;
  // Static conductivity when it is known independently of the samples.
  std::optional<double> sigma_dc;
};

void check_samples(const SoilSampleSet& s, int n_poles);

// Log-spaced sweep of a soil model with sigma_dc = 1/rho0.
SoilSampleSet soil_model_sweep(SoilModel model, double rho0, double f_lo, double f_hi,
                               int n_points, const SoilModelConstants& k = {});

struct PsoSettings {
  int particles = 40;
  int iterations = 200;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  double tau_min = 1e-9;
  double tau_max = 1e-3;
  double residual_ceiling = 0.02;
};

struct DebyeFit {
  double sigma0 = 0;
  double eps_inf = 1;
  std::vector<DebyePole> poles;  // sorted by tau, largest first
  double residual = 0;           // relative RMS over the samples
  bool above_ceiling = false;

  DebyeMedium medium(const std::string& name) const;
};

DebyeFit fit_debye(const SoilSampleSet& samples, int n_poles, std::uint64_t seed,
                   const PsoSettings& settings = {});

// Relative RMS of |model - sample| / |sample|.
double debye_fit_residual(const DebyeMedium& m, const SoilSampleSet& samples);

// Non-negative least squares min |Ax - b|, x >= 0 (Lawson-Hanson).
std::vector<double> nnls(const std::vector<std::vector<double>>& a_rows,
                         const std::vector<double>& b);

struct EarthLayer {
  double rho = 0;        // ohm m
  double thickness = 0;  // m, ignored for the bottom layer
};

struct LayeredEarth {
  std::vector<EarthLayer> layers;  // top first
};

struct SurfacePoint {
  double x = 0, y = 0;
};

struct ElectrodeArray {
  enum class Kind { wenner, dipole_dipole, general4 };
  Kind kind = Kind::general4;
  double a = 0;  // spacing (wenner, dipole-dipole)
  double n = 1;  // dipole separation factor
  SurfacePoint pa, pb, pm, pn;  // current A(+), B(-); potential M, N

  static ElectrodeArray wenner(double a);
  // B at 0, A at a, M at (n+1)a, N at (n+2)a.
  static ElectrodeArray dipole_dipole(double a, double n);
  static ElectrodeArray general(SurfacePoint a, SurfacePoint b, SurfacePoint m, SurfacePoint n);
};

void check_array(const ElectrodeArray& arr);
double geometric_factor(const ElectrodeArray& arr);

// Surface potential per unit current at horizontal distance r from a
// point electrode on the layered half-space.
double layered_surface_potential(const LayeredEarth& earth, double r);

double apparent_resistivity_layered(const LayeredEarth& earth, const ElectrodeArray& arr);

struct ApparentRow {
  double freq = 0;
  double rho_a = 0;  // ohm m
  double eps_a = 0;  // relative
  bool valid = true;
};

// Apparent admittivity 1/(k Z(f)) = 1/rho_a + j w eps0 eps_a from the
// DFTs of the voltage and current series. Empty freqs selects every DFT
// bin from 0 to Nyquist.
std::vector<ApparentRow> apparent_from_vi(std::span<const double> v, std::span<const double> i,
                                          const ElectrodeArray& arr, double dt,
                                          std::span<const double> freqs = {},
                                          double current_floor = 1e-9);

enum class DoiMethod { roy_apparao, barker };

DoiMethod parse_doi_method(const std::string& name);

// Depth of investigation of a four-electrode array on a homogeneous earth:
// depth of peak layer sensitivity (roy_apparao) or median depth (barker).
double depth_of_investigation(const ElectrodeArray& arr, DoiMethod method);

}  // namespace surge
