#pragma once

// Convolutional PML (complex-frequency-shifted stretching with recursive
// convolution). Layers wrap all six faces of the interior volume.
//
//   s(d)     = kappa(d) + sigma(d) / (alpha(d) + j w eps0)
//   sigma(d) = sigma_factor * sigma_opt * d^m,  sigma_opt = 0.8 (m+1) / (eta0 delta)
//   kappa(d) = 1 + (kappa_max - 1) d^m
//   alpha(d) = alpha_max (1 - d)^alpha_order
//   b = exp(-(sigma/kappa + alpha) dt / eps0)
//   c = sigma (b - 1) / (kappa (sigma + kappa alpha))
//
// d runs from 0 at the interior interface to 1 at the outer PEC wall.

#include <vector>

#include "surge/grid.hpp"

namespace surge {

struct CpmlParams {
  double depth_m = 0;
  double kappa_max = 1;
  double sigma_factor = 1;
  double alpha_max = 0;
  double poly_order = 3;
  double alpha_order = 1;
};

struct CpmlPoint {
  double sigma = 0, kappa = 1, alpha = 0, b = 0, c = 0;
};

// Number of lattice cells the layer occupies; throws ValidationError when
// the depth is not a whole number (>= 4) of cells or parameters are out of range.
int cpml_cells(const CpmlParams& p, double delta);

CpmlPoint cpml_profile_at(const CpmlParams& p, double delta, double dt, double d);

// Table sampled every half cell: entry q has depth q / (2 * cells).
std::vector<CpmlPoint> cpml_profiles(const CpmlParams& p, double delta, double dt);

class CpmlState {
 public:
  CpmlState(const Lattice& lat, const CpmlParams& p, double dt);

  const Lattice& lattice() const { return lat_; }
  // 1/kappa along an axis at integer (E-derivative) or half (H-derivative) positions.
  const std::vector<double>& inv_kappa_e(int axis) const { return ike_[axis]; }
  const std::vector<double>& inv_kappa_h(int axis) const { return ikh_[axis]; }

  // Adds the recursive-convolution terms to fields inside the slabs. Called
  // by step_e / step_h after the kappa-scaled curl update.
  void apply_e(FieldSet& f, const UpdateCoefficients& c);
  void apply_h(FieldSet& f, const UpdateCoefficients& c);

  double max_abs_psi() const;
  void reset();

 private:
  struct Slab {
    std::vector<double> b, c;  // per position along the axis
  };
  std::size_t psi_index(int axis, int i, int j, int k) const;
  int local(int axis, int pos) const;

  Lattice lat_;
  std::array<std::vector<double>, 3> ike_, ikh_;
  std::array<Slab, 3> se_, sh_;
  // psi_e[axis][0|1]: the two E components whose curl differentiates along axis.
  std::array<std::array<std::vector<double>, 2>, 3> psi_e_, psi_h_;
};

}  // namespace surge
