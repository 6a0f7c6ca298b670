#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "surge/constants.hpp"
#include "surge/debye.hpp"
#include "surge/errors.hpp"
#include "surge/grid.hpp"

using namespace surge;
using cd = std::complex<double>;

namespace {

DebyeMedium table1() {
  return {"deb", 16.381, 2.684e-3,
          {{92.103, 7.404e-6}, {20.825, 1.062e-6}, {374.768, 2.162e-5}, {10.387, 1.008e-8}}};
}

DebyeMedium table2_rho200() {
  return {"deb", 15.767, 5e-3,
          {{839.441, 3.096e-5}, {143.901, 4.068e-6}, {66.971, 7.217e-7}, {31.515, 9.141e-8}}};
}

// Independent closed form with the e^{-jwt}-free sign convention spelled out:
// eps = eps_inf + sum de / (1 + j w tau) - j s0 / (w eps0).
cd closed_form(const DebyeMedium& m, double f) {
  const double w = 2 * std::acos(-1.0) * f;
  cd eps(m.eps_inf, -m.sigma0 / (w * 8.8541878128e-12));
  for (const auto& p : m.poles) {
    const double x = w * p.tau;
    eps += cd(p.delta_eps / (1 + x * x), -p.delta_eps * x / (1 + x * x));
  }
  return eps;
}

void fill_random(FieldSet& f, const Lattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i <= lat.nx; ++i)
      for (int j = 0; j <= lat.ny; ++j)
        for (int k = 0; k <= lat.nz; ++k)
          if (lat.is_updated_e(a, i, j, k)) f.e(a)[lat.index(i, j, k)] = u(rng);
}

}  // namespace

TEST_CASE("dispersionless medium is flat") {
  DebyeMedium m{"flat", 7.5, 0, {{0, 1e-6}, {0, 1e-8}}};
  for (double f : {1.0, 1e3, 1e6, 1e9}) {
    const cd e = debye_complex_permittivity(m, f);
    CHECK(e.real() == 7.5);
    CHECK(e.imag() == 0.0);
  }
}

TEST_CASE("high-frequency limit approaches eps_inf") {
  DebyeMedium m = table1();
  m.sigma0 = 0;
  const cd e = debye_complex_permittivity(m, 1e13);
  CHECK(e.real() == doctest::Approx(16.381).epsilon(1e-6));
  CHECK(std::abs(e.imag()) < 1e-3);
}

TEST_CASE("measured-soil medium at 1 kHz") {
  const cd e = debye_complex_permittivity(table1(), 1e3);
  const cd ref = closed_form(table1(), 1e3);
  CHECK(e.real() == doctest::Approx(ref.real()).epsilon(1e-12));
  CHECK(e.imag() == doctest::Approx(ref.imag()).epsilon(1e-12));
  // Golden value.
  CHECK(e.real() == doctest::Approx(507.4738200079745).epsilon(1e-12));
  CHECK(e.imag() == doctest::Approx(-48299.580066690585).epsilon(1e-12));
}

TEST_CASE("lossy media have negative imaginary part at every frequency") {
  for (const auto& m : {table1(), table2_rho200()})
    for (double f = 1; f < 1e10; f *= 3.7) CHECK(debye_complex_permittivity(m, f).imag() < 0);
}

TEST_CASE("medium checks") {
  DebyeMedium m = table1();
  CHECK_NOTHROW(check_medium(m));
  m.eps_inf = 0.5;
  CHECK_THROWS_AS(check_medium(m), ParameterError);
  m = table1();
  m.poles[1].tau = 0;
  CHECK_THROWS_AS(check_medium(m), ParameterError);
  m = table1();
  m.poles.push_back({1, 1e-9});
  CHECK_THROWS_AS(check_medium(m), ParameterError);
  m = table1();
  m.sigma0 = -1;
  CHECK_THROWS_AS(check_medium(m), ParameterError);
  CHECK_THROWS_AS(debye_complex_permittivity(table1(), 0), ParameterError);
}

TEST_CASE("zero-pole medium is bit-identical to a plain lossy edge") {
  Lattice lat(6, 6, 6, 0.1, 0);
  const double dt = courant_dt(0.1, 0.9);
  MaterialMap tagged(lat), plain(lat);
  paint_block(tagged, Box{{0, 0, 0}, {0.6, 0.6, 0.3}}, 9, 0.05, 0);
  paint_block(plain, Box{{0, 0, 0}, {0.6, 0.6, 0.3}}, 9, 0.05);
  AdeState ade(tagged, {DebyeMedium{"d", 9, 0.05, {}}}, dt);
  CHECK(ade.edge_count() == 0);
  auto ct = build_coefficients(tagged, dt, ade.eps_extra());
  auto cp = build_coefficients(plain, dt);
  FieldSet a(lat);
  fill_random(a, lat, 1);
  FieldSet b = a;
  for (int n = 0; n < 50; ++n) {
    step_h(a, ct);
    step_debye_e(a, ct, ade);
    step_h(b, cp);
    step_e(b, cp);
  }
  CHECK(a.ex == b.ex);
  CHECK(a.ez == b.ez);
  CHECK(a.hy == b.hy);
}

TEST_CASE("driven cell follows the analytic permittivity") {
  // With H held at zero the only coupling is the drive J_s, so the steady
  // phasor is E = -J_s / (j w eps0 eps(w)).
  Lattice lat(4, 4, 4, 0.1, 0);
  const double dt = 1e-9;
  DebyeMedium m{"d", 4, 1e-3, {{10, 1e-7}}};
  MaterialMap map(lat);
  paint_block(map, Box{{0, 0, 0}, {0.4, 0.4, 0.4}}, m.eps_inf, m.sigma0, 0);
  const double f_max = 1 / (20 * dt * 2 * kPi);
  for (double f : {1e5, 1e6, f_max}) {
    AdeState ade(map, {m}, dt);
    auto c = build_coefficients(map, dt, ade.eps_extra());
    FieldSet fs(lat);
    const std::size_t id = lat.index(2, 2, 2);
    const double w = 2 * kPi * f;
    const double period = 1 / f;
    const long settle = long(std::ceil(std::max(2e-5, 3 * period) / dt));
    const long span = long(std::llround(period / dt));
    cd acc = 0;
    for (long n = 0; n < settle + span; ++n) {
      ade.save(fs);
      step_e(fs, c);
      const double th = (double(n) + 0.5) * dt;
      fs.ez[id] -= c.cb[2][id] * lat.delta * std::sin(w * th);
      ade.update(fs, c);
      if (n >= settle) {
        const double t = double(n + 1) * dt;
        acc += fs.ez[id] * std::exp(cd(0, -w * t));
      }
    }
    // Phasor of sin(wt) is -j; sampled over whole periods.
    const cd e_ph = acc * 2.0 / double(span);
    const cd expect = -cd(0, -1) / (cd(0, w * kEps0) * debye_complex_permittivity(m, f));
    CHECK(std::abs(e_ph - expect) / std::abs(expect) < 0.02);
  }
}

TEST_CASE("lossy dispersive cavity never gains energy") {
  Lattice lat(5, 5, 5, 0.05, 0);
  const double dt = courant_dt(0.05, 0.99);
  MaterialMap map(lat);
  paint_block(map, Box{{0, 0, 0}, {0.25, 0.25, 0.25}}, 15.767, 5e-3, 0);
  AdeState ade(map, {table2_rho200()}, dt);
  auto c = build_coefficients(map, dt, ade.eps_extra());
  FieldSet f(lat);
  fill_random(f, lat, 17);
  auto energy = [&] {
    double s = 0;
    for (int a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < f.e(a).size(); ++i) s += map.eps[a][i] * f.e(a)[i] * f.e(a)[i];
      for (std::size_t i = 0; i < f.h(a).size(); ++i) s += map.mu[a][i] * f.h(a)[i] * f.h(a)[i];
    }
    return s;
  };
  const double e0 = energy();
  double worst = 0;
  // 100 us, about three times the slowest relaxation time.
  const long steps = long(std::ceil(100e-6 / dt));
  for (long n = 0; n < steps; ++n) {
    step_h(f, c);
    step_debye_e(f, c, ade);
    if (n % 4096 == 0) worst = std::max(worst, energy());
  }
  CHECK(all_finite(f));
  // Leapfrog staggering allows a small excess over the initial E-only energy.
  CHECK(worst <= 1.05 * e0);
  CHECK(energy() < 1e-3 * e0);
}
