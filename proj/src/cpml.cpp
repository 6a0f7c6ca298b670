#include "surge/cpml.hpp"

#include <algorithm>
#include <cmath>

#include "surge/constants.hpp"
#include "surge/errors.hpp"

namespace surge {

int cpml_cells(const CpmlParams& p, double delta) {
  if (!(delta > 0)) throw ParameterError("cell size must be positive");
  const double n = p.depth_m / delta;
  const double rn = std::round(n);
  if (std::abs(n - rn) > 1e-2) throw ValidationError(0, "abc depth is not a whole number of cells");
  if (rn < 4) throw ValidationError(0, "abc depth must span at least 4 cells");
  if (!(p.kappa_max >= 1)) throw ValidationError(0, "abc kappa_max must be >= 1");
  if (!(p.sigma_factor > 0)) throw ValidationError(0, "abc sigma factor must be positive");
  if (!(p.alpha_max >= 0)) throw ValidationError(0, "abc alpha_max must be non-negative");
  if (!(p.poly_order >= 1)) throw ValidationError(0, "abc grading order must be >= 1");
  if (!(p.alpha_order >= 0)) throw ValidationError(0, "abc alpha order must be non-negative");
  return static_cast<int>(rn);
}

CpmlPoint cpml_profile_at(const CpmlParams& p, double delta, double dt, double d) {
  d = std::clamp(d, 0.0, 1.0);
  const double m = p.poly_order;
  const double sigma_opt = 0.8 * (m + 1) / (eta0() * delta);
  CpmlPoint q;
  const double dm = std::pow(d, m);
  q.sigma = p.sigma_factor * sigma_opt * dm;
  q.kappa = 1 + (p.kappa_max - 1) * dm;
  q.alpha = p.alpha_max * std::pow(1 - d, p.alpha_order);
  q.b = std::exp(-(q.sigma / q.kappa + q.alpha) * dt / kEps0);
  q.c = q.sigma > 0 ? q.sigma * (q.b - 1) / (q.kappa * (q.sigma + q.kappa * q.alpha)) : 0.0;
  return q;
}

std::vector<CpmlPoint> cpml_profiles(const CpmlParams& p, double delta, double dt) {
  const int n = cpml_cells(p, delta);
  std::vector<CpmlPoint> out;
  for (int q = 0; q <= 2 * n; ++q) out.push_back(cpml_profile_at(p, delta, dt, q / (2.0 * n)));
  return out;
}

CpmlState::CpmlState(const Lattice& lat, const CpmlParams& p, double dt) : lat_(lat) {
  const int P = lat.pml;
  for (int a = 0; a < 3; ++a) {
    const int N = lat.cells(a);
    ike_[a].assign(N + 1, 1.0);
    ikh_[a].assign(N + 1, 1.0);
    se_[a].b.assign(N + 1, 0.0);
    se_[a].c.assign(N + 1, 0.0);
    sh_[a].b.assign(N + 1, 0.0);
    sh_[a].c.assign(N + 1, 0.0);
    if (P == 0) continue;
    auto depth = [&](double x) {
      if (x < P) return (P - x) / P;
      if (x > N - P) return (x - (N - P)) / P;
      return 0.0;
    };
    for (int q = 0; q <= N; ++q) {
      const CpmlPoint e = cpml_profile_at(p, lat.delta, dt, depth(q));
      ike_[a][q] = 1 / e.kappa;
      se_[a].b[q] = e.b;
      se_[a].c[q] = e.c;
      if (q < N) {
        const CpmlPoint h = cpml_profile_at(p, lat.delta, dt, depth(q + 0.5));
        ikh_[a][q] = 1 / h.kappa;
        sh_[a].b[q] = h.b;
        sh_[a].c[q] = h.c;
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    std::size_t n = 1;
    for (int b = 0; b < 3; ++b) n *= (b == a) ? std::size_t(2 * P + 2) : std::size_t(lat.cells(b) + 1);
    if (P == 0) n = 0;
    for (auto& v : psi_e_[a]) v.assign(n, 0.0);
    for (auto& v : psi_h_[a]) v.assign(n, 0.0);
  }
}

int CpmlState::local(int axis, int pos) const {
  const int P = lat_.pml, N = lat_.cells(axis);
  return pos <= P ? pos : pos - (N - P) + P + 1;
}

std::size_t CpmlState::psi_index(int axis, int i, int j, int k) const {
  const int P = lat_.pml;
  int idx[3] = {i, j, k};
  std::size_t dim[3];
  for (int b = 0; b < 3; ++b) dim[b] = (b == axis) ? std::size_t(2 * P + 2) : std::size_t(lat_.cells(b) + 1);
  idx[axis] = local(axis, idx[axis]);
  return (std::size_t(idx[0]) * dim[1] + std::size_t(idx[1])) * dim[2] + std::size_t(idx[2]);
}

namespace {

struct Range {
  int lo, hi;  // half-open
};

// One psi component: p = b p + c (src[id + hi] - src[id + lo]), then
// dst[id] += sign * coef[id] * p, over `comp` restricted to `slab` along
// `axis`. Rows along k are contiguous in both the field and psi arrays.
struct PsiTerm {
  double* p;
  const double* b;
  const double* c;
  const double* src;
  std::ptrdiff_t lo, hi;
  double* dst;
  const double* coef;
  double sign;
};

template <class Index>
void sweep(const Lattice& L, int axis, Range slab, std::array<Range, 3> comp, const PsiTerm& t,
           Index&& psi_index) {
  comp[axis].lo = std::max(comp[axis].lo, slab.lo);
  comp[axis].hi = std::min(comp[axis].hi, slab.hi);
  const Range r0 = comp[0], r1 = comp[1], r2 = comp[2];
  if (r0.lo >= r0.hi || r1.lo >= r1.hi || r2.lo >= r2.hi) return;
  const int nk = r2.hi - r2.lo;
#pragma omp parallel for schedule(static)
  for (int i = r0.lo; i < r0.hi; ++i)
    for (int j = r1.lo; j < r1.hi; ++j) {
      const std::size_t id0 = L.index(i, j, r2.lo), q0 = psi_index(i, j, r2.lo);
      double* p = t.p + q0;
      const double* src = t.src + id0;
      double* dst = t.dst + id0;
      const double* coef = t.coef + id0;
      if (axis == 2) {
        const double* b = t.b + r2.lo;
        const double* c = t.c + r2.lo;
        for (int k = 0; k < nk; ++k) {
          p[k] = b[k] * p[k] + c[k] * (src[k + t.hi] - src[k + t.lo]);
          dst[k] += t.sign * coef[k] * p[k];
        }
      } else {
        const int pos = axis == 0 ? i : j;
        const double b = t.b[pos], c = t.c[pos];
        for (int k = 0; k < nk; ++k) {
          p[k] = b * p[k] + c * (src[k + t.hi] - src[k + t.lo]);
          dst[k] += t.sign * coef[k] * p[k];
        }
      }
    }
}

}  // namespace

void CpmlState::apply_e(FieldSet& f, const UpdateCoefficients& c) {
  const Lattice& L = lat_;
  const int P = L.pml;
  if (P == 0) return;
  const std::ptrdiff_t si = std::ptrdiff_t(L.stride_i()), sj = std::ptrdiff_t(L.stride_j());
  const int NX = L.nx, NY = L.ny, NZ = L.nz;
  const std::array<Range, 3> rx{{{0, NX}, {1, NY}, {1, NZ}}};
  const std::array<Range, 3> ry{{{1, NX}, {0, NY}, {1, NZ}}};
  const std::array<Range, 3> rz{{{1, NX}, {1, NY}, {0, NZ}}};
  const double* cb[3] = {c.cb[0].data(), c.cb[1].data(), c.cb[2].data()};

  for (int a = 0; a < 3; ++a) {
    const int N = L.cells(a);
    const Range slabs[2] = {{1, P + 1}, {N - P, N}};
    const double* b = se_[a].b.data();
    const double* cc = se_[a].c.data();
    double* p0 = psi_e_[a][0].data();
    double* p1 = psi_e_[a][1].data();
    auto q = [&](int i, int j, int k) { return psi_index(a, i, j, k); };
    for (const Range& s : slabs) {
      if (a == 0) {
        sweep(L, 0, s, ry, {p0, b, cc, f.hz.data(), -si, 0, f.ey.data(), cb[1], -1}, q);
        sweep(L, 0, s, rz, {p1, b, cc, f.hy.data(), -si, 0, f.ez.data(), cb[2], 1}, q);
      } else if (a == 1) {
        sweep(L, 1, s, rx, {p0, b, cc, f.hz.data(), -sj, 0, f.ex.data(), cb[0], 1}, q);
        sweep(L, 1, s, rz, {p1, b, cc, f.hx.data(), -sj, 0, f.ez.data(), cb[2], -1}, q);
      } else {
        sweep(L, 2, s, rx, {p0, b, cc, f.hy.data(), -1, 0, f.ex.data(), cb[0], -1}, q);
        sweep(L, 2, s, ry, {p1, b, cc, f.hx.data(), -1, 0, f.ey.data(), cb[1], 1}, q);
      }
    }
  }
}

void CpmlState::apply_h(FieldSet& f, const UpdateCoefficients& c) {
  const Lattice& L = lat_;
  const int P = L.pml;
  if (P == 0) return;
  const std::ptrdiff_t si = std::ptrdiff_t(L.stride_i()), sj = std::ptrdiff_t(L.stride_j());
  const int NX = L.nx, NY = L.ny, NZ = L.nz;
  const std::array<Range, 3> rx{{{0, NX + 1}, {0, NY}, {0, NZ}}};
  const std::array<Range, 3> ry{{{0, NX}, {0, NY + 1}, {0, NZ}}};
  const std::array<Range, 3> rz{{{0, NX}, {0, NY}, {0, NZ + 1}}};
  const double* ch[3] = {c.ch[0].data(), c.ch[1].data(), c.ch[2].data()};

  for (int a = 0; a < 3; ++a) {
    const int N = L.cells(a);
    const Range slabs[2] = {{0, P}, {N - P, N}};
    const double* b = sh_[a].b.data();
    const double* cc = sh_[a].c.data();
    double* p0 = psi_h_[a][0].data();
    double* p1 = psi_h_[a][1].data();
    auto q = [&](int i, int j, int k) { return psi_index(a, i, j, k); };
    for (const Range& s : slabs) {
      if (a == 0) {
        sweep(L, 0, s, ry, {p0, b, cc, f.ez.data(), 0, si, f.hy.data(), ch[1], 1}, q);
        sweep(L, 0, s, rz, {p1, b, cc, f.ey.data(), 0, si, f.hz.data(), ch[2], -1}, q);
      } else if (a == 1) {
        sweep(L, 1, s, rx, {p0, b, cc, f.ez.data(), 0, sj, f.hx.data(), ch[0], -1}, q);
        sweep(L, 1, s, rz, {p1, b, cc, f.ex.data(), 0, sj, f.hz.data(), ch[2], 1}, q);
      } else {
        sweep(L, 2, s, rx, {p0, b, cc, f.ey.data(), 0, 1, f.hx.data(), ch[0], 1}, q);
        sweep(L, 2, s, ry, {p1, b, cc, f.ex.data(), 0, 1, f.hy.data(), ch[1], -1}, q);
      }
    }
  }
}

double CpmlState::max_abs_psi() const {
  double m = 0;
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) {
      for (double v : psi_e_[a][s]) m = std::max(m, std::abs(v));
      for (double v : psi_h_[a][s]) m = std::max(m, std::abs(v));
    }
  return m;
}

void CpmlState::reset() {
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) {
      std::fill(psi_e_[a][s].begin(), psi_e_[a][s].end(), 0.0);
      std::fill(psi_h_[a][s].begin(), psi_h_[a][s].end(), 0.0);
    }
}

}  // namespace surge
