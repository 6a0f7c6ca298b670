#include <cmath>
#include <vector>

#include "doctest.h"
#include "surge/errors.hpp"
#include "surge/excitation.hpp"
#include "surge/simulation.hpp"

using namespace surge;

namespace {

// Independent evaluation of the normalised Heidler shape.
double heidler_ref(double i0, double t1, double t2, double n, double t) {
  const double eta = std::exp(-(t1 / t2) * std::pow(n * t2 / t1, 1 / n));
  const double x = std::pow(t / t1, n);
  return i0 / eta * x / (1 + x) * std::exp(-t / t2);
}

double fine_peak(double t1, double t2, double n) {
  double lo = 0, hi = 20 * t1, best = 0, arg = 0;
  for (int pass = 0; pass < 4; ++pass) {
    const int m = 20000;
    for (int s = 0; s <= m; ++s) {
      const double t = lo + (hi - lo) * s / m;
      const double v = heidler_ref(1, t1, t2, n, t);
      if (v > best) {
        best = v;
        arg = t;
      }
    }
    const double w = (hi - lo) / m;
    lo = std::max(0.0, arg - 2 * w);
    hi = arg + 2 * w;
  }
  return best;
}

Waveform sampled(std::vector<double> v, double dt, std::string name = "w") {
  Waveform w;
  w.name = std::move(name);
  w.kind = Waveform::Kind::sampled;
  w.sample_dt = dt;
  w.values = std::move(v);
  return w;
}

// Rectangular loop of PEC wire in a closed box: a drive gap on the left
// side, a load gap on the right side and an optional gap in the top run.
struct Loop {
  Lattice lat{10, 10, 10, 0.1, 0};
  SimulationInput in;
  EdgeRef drive{2, {3, 5, 4}, 1};
  EdgeRef load{2, {7, 5, 4}, 1};
  EdgeRef top{0, {5, 5, 7}, 1};
  EdgeRef probe{0, {4, 5, 7}, 1};

  explicit Loop(bool top_gap) {
    in.materials = MaterialMap(lat);
    const double r = 0.23 * lat.delta;
    auto wire = [&](Vec3 a, Vec3 b) {
      WireSegment s;
      s.start = a;
      s.end = b;
      s.radius = r;
      embed_wire(in.wires, lat, s);
    };
    wire({0.3, 0.5, 0.3}, {0.7, 0.5, 0.3});
    if (top_gap) {
      wire({0.3, 0.5, 0.7}, {0.5, 0.5, 0.7});
      wire({0.6, 0.5, 0.7}, {0.7, 0.5, 0.7});
    } else {
      wire({0.3, 0.5, 0.7}, {0.7, 0.5, 0.7});
    }
    wire({0.3, 0.5, 0.3}, {0.3, 0.5, 0.4});
    wire({0.3, 0.5, 0.5}, {0.3, 0.5, 0.7});
    wire({0.7, 0.5, 0.3}, {0.7, 0.5, 0.4});
    wire({0.7, 0.5, 0.5}, {0.7, 0.5, 0.7});
    in.dt = courant_dt(lat.delta, 0.99);
    in.waveforms.push_back(sampled({0, 1}, 2e-8, "ramp"));
    in.probes.push_back(Probe{ProbeKind::current, {probe}, "i"});
  }
};

}  // namespace

TEST_CASE("heidler is zero at and before t = 0 and decays to zero") {
  const std::vector<HeidlerTerm> h{{1, 3.7e-7, 1.4e-5, 10}};
  CHECK(heidler_eval(h, 0.0) == 0.0);
  CHECK(heidler_eval(h, -1e-6) == 0.0);
  CHECK(std::abs(heidler_eval(h, 5e-3)) < 1e-12);
  CHECK(heidler_eval(h, 1e-6) == doctest::Approx(heidler_ref(1, 3.7e-7, 1.4e-5, 10, 1e-6)).epsilon(1e-13));
}

TEST_CASE("heidler peak matches a fine-grid maximisation") {
  const std::vector<HeidlerTerm> h{{1, 3.7e-7, 1.4e-5, 10}};
  const double oracle = fine_peak(3.7e-7, 1.4e-5, 10);
  double peak = 0;
  for (int s = 0; s <= 20000; ++s) peak = std::max(peak, heidler_eval(h, s * 1e-9));
  CHECK(std::abs(peak - oracle) / oracle < 0.01);
  // The correction factor brings the peak close to i0.
  CHECK(oracle == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("heidler sums are linear in the terms") {
  const HeidlerTerm a{2, 1e-7, 1e-5, 2}, b{-0.5, 3e-7, 5e-6, 5};
  const std::vector<HeidlerTerm> both{a, b};
  for (double t : {1e-8, 2e-7, 3e-6}) {
    const double sum = heidler_eval(std::vector<HeidlerTerm>{a}, t) + heidler_eval(std::vector<HeidlerTerm>{b}, t);
    CHECK(heidler_eval(both, t) == doctest::Approx(sum).epsilon(1e-14));
  }
}

TEST_CASE("heidler parameter checks") {
  CHECK_NOTHROW(check_heidler({1, 3.7e-7, 1.4e-5, 10}));
  CHECK_THROWS_AS(check_heidler({1, 0, 1e-5, 2}), ParameterError);
  CHECK_THROWS_AS(check_heidler({1, 1e-7, -1e-5, 2}), ParameterError);
  CHECK_THROWS_AS(check_heidler({1, 1e-7, 1e-5, 0.5}), ParameterError);
}

TEST_CASE("sampled waveform interpolation") {
  const Waveform w = sampled({0, 10}, 1e-8);
  CHECK(waveform_sample(w, 5e-9) == doctest::Approx(5).epsilon(1e-12));
  CHECK(waveform_sample(w, 1e-8) == 10);
  CHECK(waveform_sample(w, 3e-7) == 10);
  CHECK(waveform_sample(w, 0) == 0);
  const Waveform v = sampled({1, 4, -2}, 2.0);
  CHECK(waveform_sample(v, 2.0) == 4);
  CHECK(waveform_sample(v, 3.0) == doctest::Approx(1.0));
  CHECK(waveform_sample(v, -1.0) == 1);
}

TEST_CASE("waveform checks") {
  CHECK_THROWS_AS(check_waveform(sampled({}, 1e-8)), ValidationError);
  CHECK_THROWS_AS(check_waveform(sampled({1}, 0)), ValidationError);
  Waveform h;
  h.kind = Waveform::Kind::heidler_sum;
  CHECK_THROWS_AS(check_waveform(h), ValidationError);
  h.terms.push_back({1, 1e-7, 1e-5, 2});
  CHECK_NOTHROW(check_waveform(h));
}

TEST_CASE("a zero current source changes nothing") {
  auto run = [](bool with_null) {
    Loop loop(false);
    loop.in.lumped.push_back({LumpedKind::resistor, loop.load, 50});
    loop.in.sources.push_back({SourceKind::voltage, loop.drive, 0, 0});
    if (with_null) {
      loop.in.waveforms.push_back(sampled({0, 0, 0}, 1e-8, "zero"));
      loop.in.sources.push_back({SourceKind::current, EdgeRef{0, {2, 2, 2}, 1}, 0, 1});
    }
    Simulation sim(loop.in);
    for (int n = 0; n < 200; ++n) sim.step();
    return sim.fields();
  };
  const FieldSet a = run(false), b = run(true);
  CHECK(a.ex == b.ex);
  CHECK(a.ez == b.ez);
  CHECK(a.hy == b.hy);
}

TEST_CASE("soft sources superpose") {
  const Lattice lat(8, 8, 8, 0.1, 0);
  auto run = [&](bool one, bool two) {
    SimulationInput in;
    in.materials = MaterialMap(lat);
    paint_block(in.materials, Box{{0, 0, 0}, {0.8, 0.8, 0.3}}, 6, 0.01);
    in.dt = courant_dt(lat.delta, 0.9);
    in.waveforms.push_back(sampled({0, 1, -0.5, 0.2, 0}, 3e-10, "a"));
    in.waveforms.push_back(sampled({0, -2, 1, 0}, 5e-10, "b"));
    if (one) in.sources.push_back({SourceKind::soft_e, EdgeRef{2, {3, 3, 3}, 1}, 0, 0});
    if (two) in.sources.push_back({SourceKind::soft_e, EdgeRef{0, {5, 4, 4}, -1}, 0, 1});
    Simulation sim(std::move(in));
    for (int n = 0; n < 150; ++n) sim.step();
    return sim.fields();
  };
  const FieldSet both = run(true, true), a = run(true, false), b = run(false, true);
  double worst = 0, scale = 0;
  for (int x = 0; x < 3; ++x)
    for (std::size_t i = 0; i < both.e(x).size(); ++i) {
      worst = std::max(worst, std::abs(both.e(x)[i] - a.e(x)[i] - b.e(x)[i]));
      scale = std::max(scale, std::abs(both.e(x)[i]));
    }
  CHECK(scale > 0);
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("resistor across an ideal voltage source carries V / R") {
  Loop loop(false);
  const double R = 50;
  loop.in.lumped.push_back({LumpedKind::resistor, loop.load, R});
  loop.in.sources.push_back({SourceKind::voltage, loop.drive, 0, 0});
  Simulation sim(loop.in);
  double acc = 0;
  const int settle = 3000, span = 1000;
  for (int n = 0; n < settle + span; ++n) {
    sim.step();
    if (n >= settle) acc += sim.sample()[0];
  }
  CHECK(acc / span == doctest::Approx(1.0 / R).epsilon(0.01));
  CHECK(sim.forced_edges_zero());
}

TEST_CASE("resistive voltage source matches its Norton equivalent") {
  Loop loop(false);
  const double R = 50, Rs = 25;
  loop.in.lumped.push_back({LumpedKind::resistor, loop.load, R});
  loop.in.sources.push_back({SourceKind::voltage, loop.drive, Rs, 0});
  Simulation sim(loop.in);
  double acc = 0;
  const int settle = 3000, span = 1000;
  for (int n = 0; n < settle + span; ++n) {
    sim.step();
    if (n >= settle) acc += sim.sample()[0];
  }
  CHECK(acc / span == doctest::Approx(1.0 / (R + Rs)).epsilon(0.01));
}

TEST_CASE("series capacitor blocks DC and stores C V") {
  Loop loop(true);
  const double R = 50, C = 1e-9;
  loop.in.lumped.push_back({LumpedKind::resistor, loop.load, R});
  loop.in.lumped.push_back({LumpedKind::capacitor, loop.top, C});
  loop.in.sources.push_back({SourceKind::voltage, loop.drive, 0, 0});
  loop.in.probes[0].edges[0] = EdgeRef{0, {4, 5, 3}, -1};
  Simulation sim(loop.in);
  double q = 0, late = 0;
  for (int n = 0; n < 5000; ++n) {
    sim.step();
    const double i = sim.sample()[0];
    q += i * sim.dt();
    if (n >= 4000) late += i / 1000;
  }
  // Mean over the tail: the DC part, without the residual cavity ringing.
  CHECK(std::abs(late) < 1e-3 / R);
  CHECK(q == doctest::Approx(C * 1.0).epsilon(0.02));
}

TEST_CASE("sources on wire-shorted edges are rejected") {
  Loop loop(false);
  loop.in.sources.push_back({SourceKind::current, EdgeRef{0, {4, 5, 3}, 1}, 0, 0});
  CHECK_THROWS_AS(Simulation(loop.in), ValidationError);
  Loop bad(false);
  bad.in.lumped.push_back({LumpedKind::resistor, EdgeRef{2, {3, 5, 3}, 1}, 10});
  CHECK_THROWS_AS(Simulation(bad.in), ValidationError);
}
