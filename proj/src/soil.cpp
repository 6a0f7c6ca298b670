#include "surge/soil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "surge/constants.hpp"
#include "surge/errors.hpp"

namespace surge {

namespace {

using cplx = std::complex<double>;

double omega(double f) { return 2 * kPi * f; }

}  // namespace

SoilModel parse_soil_model(const std::string& name) {
  if (name == "messier") return SoilModel::messier;
  if (name == "alipio_visacro" || name == "alipio-visacro") return SoilModel::alipio_visacro;
  if (name == "portela") return SoilModel::portela;
  throw ParameterError("unknown soil model '" + name + "'");
}

const char* soil_model_name(SoilModel m) {
  switch (m) {
    case SoilModel::messier: return "messier";
    case SoilModel::alipio_visacro: return "alipio_visacro";
    case SoilModel::portela: return "portela";
  }
  return "?";
}

// Closed-form frequency-dependent soil models.
SoilProperties soil_model_properties(SoilModel model, double rho0, double freq,
                                     const SoilModelConstants& k) {
  if (!(rho0 > 0)) throw ParameterError("rho0 must be positive");
  if (!(freq > 0)) throw ParameterError("frequency must be positive");
  const double s0 = 1.0 / rho0;
  const double w = omega(freq);
  SoilProperties p;
  switch (model) {
    case SoilModel::messier: {
      const double ei = k.messier_eps_inf;
      p.eps_r = ei * (1 + std::sqrt(2 * s0 / (w * kEps0 * ei)));
      p.sigma = s0 * (1 + std::sqrt(2 * w * kEps0 * ei / s0));
      break;
    }
    case SoilModel::alipio_visacro: {
      const double s0m = s0 * 1e3;  // mS/m
      const double h = k.av_h_scale * std::pow(s0m, k.av_h_exp);
      const double g = k.av_gamma;
      p.sigma = (s0m + s0m * h * std::pow(freq / 1e6, g)) * 1e-3;
      p.eps_r = k.av_eps_hf + std::tan(kPi * g / 2) * 1e-3 / (2 * kPi * kEps0 * std::pow(1e6, g)) *
                                  s0m * h * std::pow(freq, g - 1);
      break;
    }
    case SoilModel::portela: {
      const double a = k.portela_alpha;
      const double mag = k.portela_delta_i * std::pow(freq / 1e6, a);
      p.sigma = s0 + mag * std::cos(kPi * a / 2);
      p.eps_r = mag * std::sin(kPi * a / 2) / (w * kEps0);
      break;
    }
  }
  return p;
}

std::complex<double> complex_relative_permittivity(const SoilProperties& p, double freq) {
  return {p.eps_r, -p.sigma / (omega(freq) * kEps0)};
}

void check_samples(const SoilSampleSet& s, int n_poles) {
  if (n_poles < 1 || n_poles > kMaxDebyePoles)
    throw ParameterError("pole count must be between 1 and 4");
  if (s.points.size() < std::size_t(2 * n_poles + 2))
    throw ParameterError("not enough samples for the requested pole count");
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    if (!(p.freq > 0)) throw ParameterError("sample frequencies must be positive");
    if (i > 0 && !(p.freq > s.points[i - 1].freq))
      throw ParameterError("sample frequencies must be strictly increasing");
    if (!std::isfinite(p.eps.real()) || !std::isfinite(p.eps.imag()))
      throw ParameterError("sample values must be finite");
  }
  if (s.sigma_dc && !(*s.sigma_dc >= 0)) throw ParameterError("sigma_dc must be non-negative");
}

SoilSampleSet soil_model_sweep(SoilModel model, double rho0, double f_lo, double f_hi,
                               int n_points, const SoilModelConstants& k) {
  if (!(f_lo > 0) || !(f_hi > f_lo) || n_points < 2)
    throw ParameterError("sweep needs 0 < f_lo < f_hi and at least 2 points");
  SoilSampleSet s;
  const double a = std::log10(f_lo), b = std::log10(f_hi);
  for (int i = 0; i < n_points; ++i) {
    const double f = std::pow(10.0, a + (b - a) * i / (n_points - 1));
    s.points.push_back({f, complex_relative_permittivity(soil_model_properties(model, rho0, f, k), f)});
  }
  s.sigma_dc = 1.0 / rho0;
  return s;
}

DebyeMedium DebyeFit::medium(const std::string& name) const {
  return DebyeMedium{name, eps_inf, sigma0, poles};
}

double debye_fit_residual(const DebyeMedium& m, const SoilSampleSet& samples) {
  double acc = 0;
  for (const auto& p : samples.points) {
    const double r = std::abs(debye_complex_permittivity(m, p.freq) - p.eps) / std::abs(p.eps);
    acc += r * r;
  }
  return std::sqrt(acc / double(samples.points.size()));
}

std::vector<double> nnls(const std::vector<std::vector<double>>& a_rows,
                         const std::vector<double>& b) {
  const int m = int(a_rows.size());
  const int n = m ? int(a_rows[0].size()) : 0;
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = a_rows[i][j];
  const Eigen::VectorXd bb = Eigen::Map<const Eigen::VectorXd>(b.data(), m);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, a.norm()) * std::max(1.0, bb.norm());
  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd ap(m, idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) ap.col(c) = a.col(idx[c]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(bb);
    z.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = zp(c);
  };
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (bb - a * x);
    int best = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w(j) > wmax) {
        wmax = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;
    Eigen::VectorXd z;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0) feasible = false;
      if (feasible) break;
      double alpha = 1;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j)
        if (passive[j] && x(j) <= 1e-15) {
          passive[j] = false;
          x(j) = 0;
        }
    }
    x = z;
    for (int j = 0; j < n; ++j)
      if (!passive[j]) x(j) = 0;
  }
  return {x.data(), x.data() + n};
}

namespace {

struct LinearFit {
  double eps_inf = 1, sigma0 = 0;
  std::vector<double> delta;
  double cost = 0;  // sum of squared relative errors
};

// For fixed taus the model is linear in (eps_inf - 1, delta_eps, sigma0).
LinearFit solve_linear(const SoilSampleSet& s, const std::vector<double>& taus) {
  const int np = int(taus.size());
  const bool free_sigma = !s.sigma_dc.has_value();
  const double sig_unit = 1e-3;  // unknown carried in mS/m
  const int nc = 1 + np + (free_sigma ? 1 : 0);
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.reserve(2 * s.points.size());
  for (const auto& p : s.points) {
    const double w = omega(p.freq);
    const double wt = 1.0 / std::abs(p.eps);
    std::vector<double> re(nc, 0.0), im(nc, 0.0);
    re[0] = wt;
    for (int q = 0; q < np; ++q) {
      const cplx chi = 1.0 / cplx(1.0, w * taus[q]);
      re[1 + q] = wt * chi.real();
      im[1 + q] = wt * chi.imag();
    }
    double im_target = p.eps.imag();
    if (free_sigma)
      im[nc - 1] = -wt * sig_unit / (w * kEps0);
    else
      im_target += *s.sigma_dc / (w * kEps0);
    rows.push_back(std::move(re));
    rhs.push_back(wt * (p.eps.real() - 1.0));
    rows.push_back(std::move(im));
    rhs.push_back(wt * im_target);
  }
  const std::vector<double> x = nnls(rows, rhs);
  LinearFit out;
  out.eps_inf = 1.0 + x[0];
  out.delta.assign(x.begin() + 1, x.begin() + 1 + np);
  out.sigma0 = free_sigma ? x[nc - 1] * sig_unit : *s.sigma_dc;
  double cost = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double v = 0;
    for (int c = 0; c < nc; ++c) v += rows[r][c] * x[c];
    cost += (v - rhs[r]) * (v - rhs[r]);
  }
  out.cost = cost;
  return out;
}

std::vector<double> to_taus(const std::vector<double>& logs) {
  std::vector<double> t(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) t[i] = std::pow(10.0, logs[i]);
  return t;
}

}  // namespace

// Hybrid particle swarm / least squares: the swarm searches log10(tau),
// the amplitudes follow from NNLS.
DebyeFit fit_debye(const SoilSampleSet& samples, int n_poles, std::uint64_t seed,
                   const PsoSettings& st) {
  check_samples(samples, n_poles);
  if (st.particles < 1 || st.iterations < 0) throw ParameterError("invalid swarm settings");
  if (!(st.tau_min > 0) || !(st.tau_max > st.tau_min)) throw ParameterError("invalid tau bounds");
  bool degenerate = true;
  for (const auto& p : samples.points)
    if (std::abs(p.eps) > 0) degenerate = false;
  if (degenerate) throw ComputationError("degenerate samples: every value is zero");
  for (const auto& p : samples.points)
    if (!(std::abs(p.eps) > 0)) throw ComputationError("sample with zero permittivity");

  const int dim = n_poles;
  const double lo = std::log10(st.tau_min), hi = std::log10(st.tau_max);
  const double vmax = 0.2 * (hi - lo);
  const int np = st.particles;

  std::vector<std::mt19937_64> rng;
  rng.reserve(np);
  for (int i = 0; i < np; ++i) {
    std::seed_seq sq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(i)};
    rng.emplace_back(sq);
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<std::vector<double>> x(np, std::vector<double>(dim)), v = x, pbest;
  std::vector<double> pcost(np), cost(np);
  for (int i = 0; i < np; ++i)
    for (int d = 0; d < dim; ++d) {
      x[i][d] = lo + (hi - lo) * u01(rng[i]);
      v[i][d] = vmax * (2 * u01(rng[i]) - 1);
    }
  auto evaluate = [&]() {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < np; ++i) cost[i] = solve_linear(samples, to_taus(x[i])).cost;
  };
  evaluate();
  pbest = x;
  pcost = cost;
  int g = 0;
  for (int i = 1; i < np; ++i)
    if (pcost[i] < pcost[g]) g = i;
  std::vector<double> gbest = pbest[g];
  double gcost = pcost[g];

  for (int it = 0; it < st.iterations; ++it) {
    for (int i = 0; i < np; ++i)
      for (int d = 0; d < dim; ++d) {
        const double r1 = u01(rng[i]), r2 = u01(rng[i]);
        double vel = st.inertia * v[i][d] + st.cognitive * r1 * (pbest[i][d] - x[i][d]) +
                     st.social * r2 * (gbest[d] - x[i][d]);
        vel = std::clamp(vel, -vmax, vmax);
        double pos = x[i][d] + vel;
        if (pos < lo || pos > hi) {
          pos = std::clamp(pos, lo, hi);
          vel = 0;
        }
        v[i][d] = vel;
        x[i][d] = pos;
      }
    evaluate();
    for (int i = 0; i < np; ++i) {
      if (cost[i] < pcost[i]) {
        pcost[i] = cost[i];
        pbest[i] = x[i];
      }
      if (pcost[i] < gcost) {
        gcost = pcost[i];
        gbest = pbest[i];
      }
    }
  }

  // Pattern-search polish of the swarm optimum.
  double step = 0.05;
  for (int iter = 0; iter < 4000 && step > 1e-8; ++iter) {
    bool improved = false;
    for (int d = 0; d < dim; ++d)
      for (double s : {step, -step}) {
        std::vector<double> trial = gbest;
        trial[d] = std::clamp(trial[d] + s, lo, hi);
        const double c = solve_linear(samples, to_taus(trial)).cost;
        if (c < gcost) {
          gcost = c;
          gbest = trial;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }

  const std::vector<double> taus = to_taus(gbest);
  const LinearFit lf = solve_linear(samples, taus);
  DebyeFit fit;
  fit.eps_inf = lf.eps_inf;
  fit.sigma0 = lf.sigma0;
  for (int q = 0; q < dim; ++q) fit.poles.push_back({lf.delta[q], taus[q]});
  std::stable_sort(fit.poles.begin(), fit.poles.end(),
                   [](const DebyePole& a, const DebyePole& b) { return a.tau > b.tau; });
  fit.residual = debye_fit_residual(fit.medium("fit"), samples);
  fit.above_ceiling = fit.residual > st.residual_ceiling;
  return fit;
}

// ---------------------------------------------------------------------------
// Layered earth

namespace {

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Poly poly_scale(const Poly& a, double s) {
  Poly r = a;
  for (double& v : r) v *= s;
  return r;
}

// Largest h0 with every thickness an integer multiple of it.
double common_unit(const std::vector<double>& t) {
  const double tmin = *std::min_element(t.begin(), t.end());
  for (int q = 1; q <= 10000; ++q) {
    const double h0 = tmin / q;
    bool ok = true;
    for (double v : t) {
      const double r = v / h0;
      if (std::abs(r - std::round(r)) > 1e-6 * std::max(1.0, r)) {
        ok = false;
        break;
      }
    }
    if (ok) return h0;
  }
  throw ComputationError("layer thicknesses are not commensurate within 1e-4 of the thinnest layer");
}

void check_earth(const LayeredEarth& e) {
  if (e.layers.empty()) throw ParameterError("layered earth needs at least one layer");
  for (std::size_t i = 0; i < e.layers.size(); ++i) {
    if (!(e.layers[i].rho > 0)) throw ParameterError("layer resistivity must be positive");
    if (i + 1 < e.layers.size() && !(e.layers[i].thickness > 0))
      throw ParameterError("layer thickness must be positive");
  }
}

}  // namespace

// Image series V(r) = rho1/(2 pi) [1/r + 2 sum q_m / sqrt(r^2 + (2 m h0)^2)],
// where 1 + 2 sum q_m u^m, u = exp(-2 lambda h0), is the expansion of the
// transformed-resistivity kernel of the layered half-space.
double layered_surface_potential(const LayeredEarth& earth, double r) {
  check_earth(earth);
  if (!(r > 0)) throw ParameterError("distance must be positive");
  const auto& L = earth.layers;
  const double rho1 = L[0].rho;
  if (L.size() == 1) return rho1 / (2 * kPi * r);

  std::vector<double> th;
  for (std::size_t i = 0; i + 1 < L.size(); ++i) th.push_back(L[i].thickness);
  const double h0 = common_unit(th);

  // T_i = rho_i (T_{i+1} + rho_i t) / (rho_i + T_{i+1} t), t = (1 - u^k)/(1 + u^k)
  Poly p{L.back().rho}, q{1.0};
  for (int i = int(L.size()) - 2; i >= 0; --i) {
    const int k = int(std::lround(L[i].thickness / h0));
    Poly plus(k + 1, 0.0), minus(k + 1, 0.0);
    plus[0] = 1;
    plus[k] += 1;
    minus[0] = 1;
    minus[k] -= 1;
    const double rho = L[i].rho;
    Poly np = poly_scale(poly_add(poly_mul(p, plus), poly_scale(poly_mul(q, minus), rho)), rho);
    Poly nq = poly_add(poly_scale(poly_mul(q, plus), rho), poly_mul(p, minus));
    const double norm = std::abs(nq[0]);
    p = poly_scale(np, 1.0 / norm);
    q = poly_scale(nq, 1.0 / norm);
  }
  // Power series of p / (rho1 q).
  const std::size_t window = q.size() + 1;
  std::vector<double> c;
  double sum = 1.0 / r;
  std::size_t quiet = 0;
  const std::size_t max_terms = 2000000;
  c.reserve(1024);
  for (std::size_t m = 0; m < max_terms; ++m) {
    double a = m < p.size() ? p[m] / rho1 : 0.0;
    for (std::size_t j = 1; j < q.size() && j <= m; ++j) a -= q[j] * c[m - j];
    c.push_back(a / q[0]);
    if (m == 0) continue;  // c0 == 1
    const double z = 2.0 * double(m) * h0;
    const double term = c[m] / std::sqrt(r * r + z * z);  // 2 q_m = c_m
    sum += term;
    if (std::abs(term) < 1e-9 * std::abs(sum)) {
      if (++quiet >= window) return rho1 / (2 * kPi) * sum;
    } else {
      quiet = 0;
    }
  }
  throw ComputationError("image series did not converge within 2e6 terms (contrast too high)");
}

ElectrodeArray ElectrodeArray::wenner(double a) {
  ElectrodeArray e;
  e.kind = Kind::wenner;
  e.a = a;
  e.pa = {0, 0};
  e.pm = {a, 0};
  e.pn = {2 * a, 0};
  e.pb = {3 * a, 0};
  return e;
}

ElectrodeArray ElectrodeArray::dipole_dipole(double a, double n) {
  ElectrodeArray e;
  e.kind = Kind::dipole_dipole;
  e.a = a;
  e.n = n;
  e.pb = {0, 0};
  e.pa = {a, 0};
  e.pm = {(n + 1) * a, 0};
  e.pn = {(n + 2) * a, 0};
  return e;
}

ElectrodeArray ElectrodeArray::general(SurfacePoint a, SurfacePoint b, SurfacePoint m,
                                       SurfacePoint n) {
  ElectrodeArray e;
  e.kind = Kind::general4;
  e.pa = a;
  e.pb = b;
  e.pm = m;
  e.pn = n;
  return e;
}

namespace {

double dist(SurfacePoint p, SurfacePoint q) { return std::hypot(p.x - q.x, p.y - q.y); }

}  // namespace

void check_array(const ElectrodeArray& arr) {
  if (arr.kind == ElectrodeArray::Kind::wenner && !(arr.a > 0))
    throw ParameterError("array spacing must be positive");
  if (arr.kind == ElectrodeArray::Kind::dipole_dipole && (!(arr.a > 0) || !(arr.n > 0)))
    throw ParameterError("dipole-dipole needs a > 0 and n > 0");
  const SurfacePoint pts[4] = {arr.pa, arr.pb, arr.pm, arr.pn};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!(dist(pts[i], pts[j]) > 0)) throw ParameterError("electrode positions must be distinct");
}

double geometric_factor(const ElectrodeArray& arr) {
  check_array(arr);
  const double g = 1 / dist(arr.pa, arr.pm) - 1 / dist(arr.pb, arr.pm) -
                   1 / dist(arr.pa, arr.pn) + 1 / dist(arr.pb, arr.pn);
  if (!(std::abs(g) > 0)) throw ParameterError("array has an infinite geometric factor");
  return 2 * kPi / g;
}

double apparent_resistivity_layered(const LayeredEarth& earth, const ElectrodeArray& arr) {
  const double k = geometric_factor(arr);
  auto v = [&](SurfacePoint p, SurfacePoint q) { return layered_surface_potential(earth, dist(p, q)); };
  const double dv = v(arr.pa, arr.pm) - v(arr.pb, arr.pm) - v(arr.pa, arr.pn) + v(arr.pb, arr.pn);
  return k * dv;
}

std::vector<ApparentRow> apparent_from_vi(std::span<const double> v, std::span<const double> i,
                                          const ElectrodeArray& arr, double dt,
                                          std::span<const double> freqs, double current_floor) {
  if (!(dt > 0)) throw ParameterError("dt must be positive");
  if (v.size() != i.size() || v.empty()) throw ParameterError("series must have equal nonzero length");
  double imax = 0;
  for (double x : i) imax = std::max(imax, std::abs(x));
  if (!(imax > 0)) throw ParameterError("current series is identically zero");
  const double k = geometric_factor(arr);
  const std::size_t n = v.size();

  std::vector<double> fs;
  std::vector<cplx> vf, jf;
  if (freqs.empty()) {
    Eigen::FFT<double> fft;
    std::vector<double> vv(v.begin(), v.end()), ii(i.begin(), i.end());
    std::vector<cplx> a, b;
    fft.fwd(a, vv);
    fft.fwd(b, ii);
    for (std::size_t q = 0; q <= n / 2; ++q) {
      fs.push_back(double(q) / (double(n) * dt));
      vf.push_back(a[q]);
      jf.push_back(b[q]);
    }
  } else {
    for (double f : freqs) {
      if (!(f >= 0)) throw ParameterError("frequencies must be non-negative");
      cplx a = 0, b = 0;
      const double w = omega(f) * dt;
      for (std::size_t q = 0; q < n; ++q) {
        const cplx e = std::polar(1.0, -w * double(q));
        a += v[q] * e;
        b += i[q] * e;
      }
      fs.push_back(f);
      vf.push_back(a);
      jf.push_back(b);
    }
  }
  double jmax = 0;
  for (const auto& b : jf) jmax = std::max(jmax, std::abs(b));
  std::vector<ApparentRow> rows;
  for (std::size_t q = 0; q < fs.size(); ++q) {
    ApparentRow row;
    row.freq = fs[q];
    if (!(std::abs(jf[q]) > current_floor * std::max(jmax, imax))) {
      row.valid = false;
      rows.push_back(row);
      continue;
    }
    const cplx z = vf[q] / jf[q];
    const cplx y = 1.0 / (k * z);
    row.rho_a = 1.0 / y.real();
    row.eps_a = row.freq > 0 ? y.imag() / (omega(row.freq) * kEps0) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

DoiMethod parse_doi_method(const std::string& name) {
  if (name == "roy_apparao" || name == "roy-apparao") return DoiMethod::roy_apparao;
  if (name == "barker") return DoiMethod::barker;
  throw ParameterError("unknown depth-of-investigation method '" + name + "'");
}

// Layer sensitivity of a homogeneous half-space: a current/potential pair
// at separation x weights depth z by 4z / (x^2 + 4z^2)^{3/2}. roy_apparao
// takes the peak of the signed sum, barker its median.
double depth_of_investigation(const ElectrodeArray& arr, DoiMethod method) {
  check_array(arr);
  struct Pair {
    double x, s;
  };
  const Pair pairs[4] = {{dist(arr.pa, arr.pm), 1},
                         {dist(arr.pb, arr.pm), -1},
                         {dist(arr.pa, arr.pn), -1},
                         {dist(arr.pb, arr.pn), 1}};
  auto sens = [&](double z) {
    double g = 0;
    for (const auto& p : pairs) g += p.s * 4 * z / std::pow(p.x * p.x + 4 * z * z, 1.5);
    return g;
  };
  auto cumulative = [&](double z) {
    double c = 0;
    for (const auto& p : pairs) c += p.s * (1 / p.x - 1 / std::sqrt(p.x * p.x + 4 * z * z));
    return c;
  };
  double span = 0;
  for (const auto& p : pairs) span = std::max(span, p.x);
  const double total = cumulative(std::numeric_limits<double>::infinity());
  if (!(std::abs(total) > 0)) throw ParameterError("array has no net sensitivity");
  const int n = 200000;
  const double zmax = 20 * span;
  if (method == DoiMethod::roy_apparao) {
    const double sign = total > 0 ? 1 : -1;
    int best = 1;
    double gbest = -std::numeric_limits<double>::infinity();
    for (int q = 1; q <= n; ++q) {
      const double gq = sign * sens(zmax * q / n);
      if (gq > gbest) {
        gbest = gq;
        best = q;
      }
    }
    double a = zmax * (best - 1) / n, b = zmax * (best + 1) / n;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200 && b - a > 1e-14 * span; ++it) {
      const double c = b - phi * (b - a), d = a + phi * (b - a);
      if (sign * sens(c) > sign * sens(d))
        b = d;
      else
        a = c;
    }
    return 0.5 * (a + b);
  }
  const double half = 0.5 * total;
  auto reached = [&](double z) { return total > 0 ? cumulative(z) >= half : cumulative(z) <= half; };
  double hi = zmax;
  while (!reached(hi)) hi *= 2;
  int q = 1;
  while (q < n && !reached(hi * q / n)) ++q;
  double a = hi * (q - 1) / n, b = hi * q / n;
  for (int it = 0; it < 200 && b - a > 1e-15 * span; ++it) {
    const double m = 0.5 * (a + b);
    if (reached(m))
      b = m;
    else
      a = m;
  }
  return 0.5 * (a + b);
}

}  // namespace surge
