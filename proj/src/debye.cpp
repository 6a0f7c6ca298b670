#include "surge/debye.hpp"

#include <algorithm>
#include <cmath>

#include "surge/constants.hpp"
#include "surge/errors.hpp"

namespace surge {

void check_medium(const DebyeMedium& m) {
  if (!(m.eps_inf >= 1)) throw ParameterError("Debye eps_inf must be >= 1");
  if (!(m.sigma0 >= 0)) throw ParameterError("Debye sigma0 must be non-negative");
  if (m.poles.size() > kMaxDebyePoles) throw ParameterError("at most 4 Debye poles are supported");
  for (const auto& p : m.poles) {
    if (!(p.delta_eps >= 0)) throw ParameterError("Debye delta_eps must be non-negative");
    if (!(p.tau > 0)) throw ParameterError("Debye tau must be positive");
  }
}

std::complex<double> debye_complex_permittivity(const DebyeMedium& m, double freq) {
  if (!(freq > 0)) throw ParameterError("frequency must be positive");
  const double w = 2 * kPi * freq;
  const std::complex<double> j(0, 1);
  std::complex<double> eps = m.eps_inf;
  for (const auto& p : m.poles) eps += p.delta_eps / (1.0 + j * w * p.tau);
  eps -= j * m.sigma0 / (w * kEps0);
  return eps;
}

AdeState::AdeState(const MaterialMap& map, std::vector<DebyeMedium> media, double dt)
    : media_(std::move(media)) {
  coeffs_.resize(media_.size());
  eps_extra_.assign(media_.size(), 0.0);
  for (std::size_t m = 0; m < media_.size(); ++m) {
    check_medium(media_[m]);
    PoleCoeffs& pc = coeffs_[m];
    pc.n = static_cast<int>(media_[m].poles.size());
    double gsum = 0;
    for (int p = 0; p < pc.n; ++p) {
      const auto& pole = media_[m].poles[p];
      const double r = dt / (2 * pole.tau);
      pc.k[p] = (1 - r) / (1 + r);
      pc.g[p] = (pole.delta_eps * kEps0 / pole.tau) / (1 + r);
      pc.h[p] = 0.5 * (1 + pc.k[p]);
      gsum += pc.g[p];
    }
    eps_extra_[m] = 0.5 * dt * gsum;
  }
  const Lattice& L = map.lattice;
  for (int a = 0; a < 3; ++a) {
    EdgeList& el = edges_[a];
    for (int i = 0; i <= L.nx; ++i)
      for (int j = 0; j <= L.ny; ++j)
        for (int k = 0; k <= L.nz; ++k) {
          const std::size_t id = L.index(i, j, k);
          const int m = map.debye[a][id];
          if (m < 0 || std::size_t(m) >= media_.size() || coeffs_[m].n == 0) continue;
          if (!L.is_updated_e(a, i, j, k)) continue;
          el.index.push_back(id);
          el.medium.push_back(static_cast<std::int16_t>(m));
        }
    el.e_old.assign(el.index.size(), 0.0);
    el.j.assign(el.index.size() * kMaxDebyePoles, 0.0);
  }
}

std::size_t AdeState::edge_count() const {
  return edges_[0].index.size() + edges_[1].index.size() + edges_[2].index.size();
}

void AdeState::save(const FieldSet& f) {
  for (int a = 0; a < 3; ++a) {
    EdgeList& el = edges_[a];
    const double* e = f.e(a).data();
    const std::size_t n = el.index.size();
#pragma omp parallel for schedule(static)
    for (std::size_t d = 0; d < n; ++d) el.e_old[d] = e[el.index[d]];
  }
}

void AdeState::update(FieldSet& f, const UpdateCoefficients& c) {
  const double delta = c.lattice.delta;
  for (int a = 0; a < 3; ++a) {
    EdgeList& el = edges_[a];
    double* e = f.e(a).data();
    const double* cb = c.cb[a].data();
    const std::size_t n = el.index.size();
#pragma omp parallel for schedule(static)
    for (std::size_t d = 0; d < n; ++d) {
      const std::size_t id = el.index[d];
      const PoleCoeffs& pc = coeffs_[el.medium[d]];
      double* j = &el.j[d * kMaxDebyePoles];
      double acc = 0;
      for (int p = 0; p < pc.n; ++p) acc += pc.h[p] * j[p];
      e[id] -= cb[id] * delta * acc;
      const double de = e[id] - el.e_old[d];
      for (int p = 0; p < pc.n; ++p) j[p] = pc.k[p] * j[p] + pc.g[p] * de;
    }
  }
}

double AdeState::max_abs_current() const {
  double m = 0;
  for (const auto& el : edges_)
    for (double v : el.j) m = std::max(m, std::abs(v));
  return m;
}

void step_debye_e(FieldSet& f, const UpdateCoefficients& c, AdeState& ade, CpmlState* cpml) {
  ade.save(f);
  step_e(f, c, cpml);
  ade.update(f, c);
}

}  // namespace surge
