#include "surge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "surge/constants.hpp"
#include "surge/cpml.hpp"
#include "surge/errors.hpp"

namespace surge {

double courant_dt(double delta, double cfl) {
  if (!(delta > 0)) throw ParameterError("cell size must be positive");
  if (!(cfl > 0 && cfl <= 1)) throw ParameterError("CFL fraction must lie in (0, 1]");
  return cfl * delta / (kSpeedOfLight * std::sqrt(3.0));
}

void check_grid_spec(const GridSpec& g, double calctime) {
  if (g.nx < 4 || g.ny < 4 || g.nz < 4)
    throw ParameterError("grid needs at least 4 cells per axis");
  if (!(g.delta > 0)) throw ParameterError("cell size must be positive");
  if (!(g.dt > 0)) throw ParameterError("time step must be positive");
  if (g.dt > courant_dt(g.delta, 1.0) * (1 + 1e-12))
    throw ParameterError("time step exceeds the Courant limit");
  if (double(g.n_steps) * g.dt < calctime * (1 - 1e-12))
    throw ParameterError("step count does not cover the requested time");
}

Lattice::Lattice(int interior_nx, int interior_ny, int interior_nz, double d, int pml_cells)
    : nx(interior_nx + 2 * pml_cells),
      ny(interior_ny + 2 * pml_cells),
      nz(interior_nz + 2 * pml_cells),
      pml(pml_cells),
      delta(d) {}

double Lattice::to_lattice(int /*axis*/, double meters) const { return meters / delta + pml; }

bool Lattice::is_updated_e(int axis, int i, int j, int k) const {
  const int idx[3] = {i, j, k};
  for (int b = 0; b < 3; ++b) {
    const int n = cells(b);
    if (b == axis) {
      if (idx[b] < 0 || idx[b] >= n) return false;
    } else if (idx[b] < 1 || idx[b] > n - 1) {
      return false;
    }
  }
  return true;
}

FieldSet::FieldSet(const Lattice& lat)
    : ex(lat.nodes(), 0.0),
      ey(lat.nodes(), 0.0),
      ez(lat.nodes(), 0.0),
      hx(lat.nodes(), 0.0),
      hy(lat.nodes(), 0.0),
      hz(lat.nodes(), 0.0) {}

MaterialMap::MaterialMap(const Lattice& lat) : lattice(lat) {
  for (int a = 0; a < 3; ++a) {
    eps[a].assign(lat.nodes(), kEps0);
    sigma[a].assign(lat.nodes(), 0.0);
    mu[a].assign(lat.nodes(), kMu0);
    debye[a].assign(lat.nodes(), -1);
  }
}

namespace {

// Index interval [first, last] along `axis` whose clamped edge-midpoint
// coordinate for component `comp` lies in [lo, hi]. Empty when first > last.
std::pair<int, int> paint_range(const Lattice& lat, int comp, int axis, double lo, double hi) {
  const int n = lat.cells(axis);
  const int top = (axis == comp) ? n - 1 : n;
  const double offset = (axis == comp) ? 0.5 : 0.0;
  const double extent = lat.interior(axis) * lat.delta;
  const double tol = 1e-9 * lat.delta;
  int first = top + 1, last = -1;
  for (int p = 0; p <= top; ++p) {
    const double x = std::clamp((p + offset - lat.pml) * lat.delta, 0.0, extent);
    if (x >= lo - tol && x <= hi + tol) {
      first = std::min(first, p);
      last = std::max(last, p);
    }
  }
  return {first, last};
}

}  // namespace

void paint_block(MaterialMap& map, const Box& box, double eps_r, double sigma, int debye_id) {
  if (!(eps_r >= 1)) throw ParameterError("relative permittivity must be >= 1");
  if (!(sigma >= 0)) throw ParameterError("conductivity must be non-negative");
  const Lattice& lat = map.lattice;
  const double tol = 1e-9 * lat.delta;
  for (int b = 0; b < 3; ++b) {
    const double extent = lat.interior(b) * lat.delta;
    if (box.lo[b] > box.hi[b] || box.lo[b] < -tol || box.hi[b] > extent + tol)
      throw ValidationError(0, "block lies outside the volume");
    if (box.hi[b] - box.lo[b] <= tol) return;
  }
  for (int a = 0; a < 3; ++a) {
    std::pair<int, int> r[3];
    for (int b = 0; b < 3; ++b) r[b] = paint_range(lat, a, b, box.lo[b], box.hi[b]);
    for (int i = r[0].first; i <= r[0].second; ++i)
      for (int j = r[1].first; j <= r[1].second; ++j)
        for (int k = r[2].first; k <= r[2].second; ++k) {
          const std::size_t id = lat.index(i, j, k);
          map.eps[a][id] = eps_r * kEps0;
          map.sigma[a][id] = sigma;
          map.debye[a][id] = static_cast<std::int16_t>(debye_id);
        }
  }
}

UpdateCoefficients build_coefficients(const MaterialMap& map, double dt,
                                      std::span<const double> eps_extra) {
  UpdateCoefficients c;
  c.lattice = map.lattice;
  c.dt = dt;
  const Lattice& lat = map.lattice;
  const double inv_d = 1.0 / lat.delta;
  for (int a = 0; a < 3; ++a) {
    c.ca[a].assign(lat.nodes(), 0.0);
    c.cb[a].assign(lat.nodes(), 0.0);
    c.ch[a].assign(lat.nodes(), 0.0);
    for (std::size_t id = 0; id < lat.nodes(); ++id) {
      double eps = map.eps[a][id];
      const int m = map.debye[a][id];
      if (m >= 0 && std::size_t(m) < eps_extra.size()) eps += eps_extra[m];
      const double s = map.sigma[a][id] * dt / (2 * eps);
      c.ca[a][id] = (1 - s) / (1 + s);
      c.cb[a][id] = (dt / eps) / (1 + s) * inv_d;
      c.ch[a][id] = dt / map.mu[a][id] * inv_d;
    }
  }
  // Tangential E on the outer wall is never updated; keep its coefficients inert.
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i <= lat.nx; ++i)
      for (int j = 0; j <= lat.ny; ++j)
        for (int k = 0; k <= lat.nz; ++k)
          if (!lat.is_updated_e(a, i, j, k)) {
            const std::size_t id = lat.index(i, j, k);
            c.ca[a][id] = 0;
            c.cb[a][id] = 0;
          }
  index_coefficients(c);
  return c;
}

void index_coefficients(UpdateCoefficients& c) {
  constexpr std::size_t kMaxEntries = 65536;
  bool ok = true;
  for (int a = 0; a < 3 && ok; ++a) {
    std::map<std::pair<double, double>, std::uint16_t> e_table{{{0.0, 0.0}, 0}};
    std::map<double, std::uint16_t> h_table;
    c.ta[a] = {0.0};
    c.tb[a] = {0.0};
    c.th[a].clear();
    c.e_id[a].resize(c.ca[a].size());
    c.h_id[a].resize(c.ch[a].size());
    for (std::size_t id = 0; id < c.ca[a].size() && ok; ++id) {
      const auto key = std::make_pair(c.ca[a][id], c.cb[a][id]);
      auto it = e_table.find(key);
      if (it == e_table.end()) {
        if (e_table.size() >= kMaxEntries) {
          ok = false;
          break;
        }
        it = e_table.emplace(key, std::uint16_t(c.ta[a].size())).first;
        c.ta[a].push_back(key.first);
        c.tb[a].push_back(key.second);
      }
      c.e_id[a][id] = it->second;
      auto jt = h_table.find(c.ch[a][id]);
      if (jt == h_table.end()) {
        if (h_table.size() >= kMaxEntries) {
          ok = false;
          break;
        }
        jt = h_table.emplace(c.ch[a][id], std::uint16_t(c.th[a].size())).first;
        c.th[a].push_back(c.ch[a][id]);
      }
      c.h_id[a][id] = jt->second;
    }
  }
  if (!ok)
    for (int a = 0; a < 3; ++a) {
      c.e_id[a].clear();
      c.h_id[a].clear();
      c.ta[a].clear();
      c.tb[a].clear();
      c.th[a].clear();
    }
}

void force_edge(UpdateCoefficients& c, int axis, std::size_t index) {
  c.ca[axis][index] = 0;
  c.cb[axis][index] = 0;
  if (!c.e_id[axis].empty()) c.e_id[axis][index] = 0;
}

namespace {

struct Stretch {
  std::array<std::vector<double>, 3> ones;
  explicit Stretch(const Lattice& lat) {
    for (int a = 0; a < 3; ++a) ones[a].assign(lat.cells(a) + 1, 1.0);
  }
};

// Coefficient access, either per-element arrays or index + table.
template <bool Indexed>
struct ECoef {
  const double* ca;
  const double* cb;
  const std::uint16_t* ix;
  ECoef(const UpdateCoefficients& c, int a)
      : ca(Indexed ? c.ta[a].data() : c.ca[a].data()),
        cb(Indexed ? c.tb[a].data() : c.cb[a].data()),
        ix(Indexed ? c.e_id[a].data() : nullptr) {}
  double a(std::size_t id) const {
    if constexpr (Indexed) return ca[ix[id]];
    else return ca[id];
  }
  double b(std::size_t id) const {
    if constexpr (Indexed) return cb[ix[id]];
    else return cb[id];
  }
};

template <bool Indexed>
struct HCoef {
  const double* ch;
  const std::uint16_t* ix;
  HCoef(const UpdateCoefficients& c, int a)
      : ch(Indexed ? c.th[a].data() : c.ch[a].data()), ix(Indexed ? c.h_id[a].data() : nullptr) {}
  double operator()(std::size_t id) const {
    if constexpr (Indexed) return ch[ix[id]];
    else return ch[id];
  }
};

template <bool Indexed>
void h_kernel(FieldSet& f, const UpdateCoefficients& c, const double* kx, const double* ky,
              const double* kz) {
  const Lattice& L = c.lattice;
  const int NX = L.nx, NY = L.ny, NZ = L.nz;
  const std::size_t si = L.stride_i(), sj = L.stride_j();
  const double* ex = f.ex.data();
  const double* ey = f.ey.data();
  const double* ez = f.ez.data();
  double* hx = f.hx.data();
  double* hy = f.hy.data();
  double* hz = f.hz.data();
  const HCoef<Indexed> chx(c, 0), chy(c, 1), chz(c, 2);

#pragma omp parallel for schedule(static)
  for (int i = 0; i <= NX; ++i)
    for (int j = 0; j < NY; ++j) {
      const std::size_t base = L.index(i, j, 0);
      const double sy = ky[j];
      for (int k = 0; k < NZ; ++k) {
        const std::size_t id = base + k;
        hx[id] -= chx(id) * ((ez[id + sj] - ez[id]) * sy - (ey[id + 1] - ey[id]) * kz[k]);
      }
    }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j <= NY; ++j) {
      const std::size_t base = L.index(i, j, 0);
      const double sx = kx[i];
      for (int k = 0; k < NZ; ++k) {
        const std::size_t id = base + k;
        hy[id] -= chy(id) * ((ex[id + 1] - ex[id]) * kz[k] - (ez[id + si] - ez[id]) * sx);
      }
    }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) {
      const std::size_t base = L.index(i, j, 0);
      const double sx = kx[i], sy = ky[j];
      for (int k = 0; k <= NZ; ++k) {
        const std::size_t id = base + k;
        hz[id] -= chz(id) * ((ey[id + si] - ey[id]) * sx - (ex[id + sj] - ex[id]) * sy);
      }
    }
}

template <bool Indexed>
void e_kernel(FieldSet& f, const UpdateCoefficients& c, const double* kx, const double* ky,
              const double* kz) {
  const Lattice& L = c.lattice;
  const int NX = L.nx, NY = L.ny, NZ = L.nz;
  const std::size_t si = L.stride_i(), sj = L.stride_j();
  double* ex = f.ex.data();
  double* ey = f.ey.data();
  double* ez = f.ez.data();
  const double* hx = f.hx.data();
  const double* hy = f.hy.data();
  const double* hz = f.hz.data();
  {
    const ECoef<Indexed> cc(c, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < NX; ++i)
      for (int j = 1; j < NY; ++j) {
        const std::size_t base = L.index(i, j, 0);
        const double sy = ky[j];
        for (int k = 1; k < NZ; ++k) {
          const std::size_t id = base + k;
          const double curl = (hz[id] - hz[id - sj]) * sy - (hy[id] - hy[id - 1]) * kz[k];
          ex[id] = cc.a(id) * ex[id] + cc.b(id) * curl;
        }
      }
  }
  {
    const ECoef<Indexed> cc(c, 1);
#pragma omp parallel for schedule(static)
    for (int i = 1; i < NX; ++i)
      for (int j = 0; j < NY; ++j) {
        const std::size_t base = L.index(i, j, 0);
        const double sx = kx[i];
        for (int k = 1; k < NZ; ++k) {
          const std::size_t id = base + k;
          const double curl = (hx[id] - hx[id - 1]) * kz[k] - (hz[id] - hz[id - si]) * sx;
          ey[id] = cc.a(id) * ey[id] + cc.b(id) * curl;
        }
      }
  }
  {
    const ECoef<Indexed> cc(c, 2);
#pragma omp parallel for schedule(static)
    for (int i = 1; i < NX; ++i)
      for (int j = 1; j < NY; ++j) {
        const std::size_t base = L.index(i, j, 0);
        const double sx = kx[i], sy = ky[j];
        for (int k = 0; k < NZ; ++k) {
          const std::size_t id = base + k;
          const double curl = (hy[id] - hy[id - si]) * sx - (hx[id] - hx[id - sj]) * sy;
          ez[id] = cc.a(id) * ez[id] + cc.b(id) * curl;
        }
      }
  }
}

}  // namespace

void step_h(FieldSet& f, const UpdateCoefficients& c, CpmlState* cpml) {
  Stretch unit(c.lattice);
  const double* kx = cpml ? cpml->inv_kappa_h(0).data() : unit.ones[0].data();
  const double* ky = cpml ? cpml->inv_kappa_h(1).data() : unit.ones[1].data();
  const double* kz = cpml ? cpml->inv_kappa_h(2).data() : unit.ones[2].data();
  if (!c.h_id[0].empty())
    h_kernel<true>(f, c, kx, ky, kz);
  else
    h_kernel<false>(f, c, kx, ky, kz);
  if (cpml) cpml->apply_h(f, c);
}

void step_e(FieldSet& f, const UpdateCoefficients& c, CpmlState* cpml) {
  Stretch unit(c.lattice);
  const double* kx = cpml ? cpml->inv_kappa_e(0).data() : unit.ones[0].data();
  const double* ky = cpml ? cpml->inv_kappa_e(1).data() : unit.ones[1].data();
  const double* kz = cpml ? cpml->inv_kappa_e(2).data() : unit.ones[2].data();
  if (!c.e_id[0].empty())
    e_kernel<true>(f, c, kx, ky, kz);
  else
    e_kernel<false>(f, c, kx, ky, kz);
  if (cpml) cpml->apply_e(f, c);
}

double max_abs_divergence_h(const FieldSet& f, const Lattice& L) {
  const std::size_t si = L.stride_i(), sj = L.stride_j();
  double worst = 0;
  for (int i = 0; i < L.nx; ++i)
    for (int j = 0; j < L.ny; ++j)
      for (int k = 0; k < L.nz; ++k) {
        const std::size_t id = L.index(i, j, k);
        const double div = (f.hx[id + si] - f.hx[id]) + (f.hy[id + sj] - f.hy[id]) +
                           (f.hz[id + 1] - f.hz[id]);
        worst = std::max(worst, std::abs(div));
      }
  return worst;
}

double max_abs(const Field& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double discrete_energy(const FieldSet& f, const FieldSet& h_prev, const MaterialMap& map) {
  double w = 0;
  for (int a = 0; a < 3; ++a) {
    const Field& e = f.e(a);
    const Field& h = f.h(a);
    const Field& hp = h_prev.h(a);
    for (std::size_t id = 0; id < e.size(); ++id) {
      w += 0.5 * map.eps[a][id] * e[id] * e[id];
      w += 0.5 * map.mu[a][id] * h[id] * hp[id];
    }
  }
  return w;
}

bool all_finite(const FieldSet& f) {
  bool ok = true;
  for (int a = 0; a < 3; ++a) {
    const Field& e = f.e(a);
    const Field& h = f.h(a);
    const std::size_t n = e.size();
#pragma omp parallel for reduction(&& : ok) schedule(static)
    for (std::size_t id = 0; id < n; ++id) ok = ok && std::isfinite(e[id]) && std::isfinite(h[id]);
  }
  return ok;
}

}  // namespace surge
