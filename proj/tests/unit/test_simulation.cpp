#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "surge/constants.hpp"
#include "surge/errors.hpp"
#include "surge/simulation.hpp"

using namespace surge;

namespace {

Waveform ramp() {
  Waveform w;
  w.name = "ramp";
  w.sample_dt = 2e-9;
  w.values = {0, 1};
  return w;
}

// Lossy dispersive half space with a thin wire, an absorbing layer and a
// current source: exercises every kernel.
SimulationInput full_input(double wire_radius) {
  Lattice lat(10, 10, 10, 0.1, 3);
  SimulationInput in;
  in.materials = MaterialMap(lat);
  in.media.push_back(DebyeMedium{"soil", 10, 0.005, {{40, 1e-6}, {10, 1e-7}}});
  paint_block(in.materials, Box{{0, 0, 0}, {1, 1, 0.5}}, 10, 0.005, 0);
  WireSegment w;
  w.start = {0.3, 0.5, 0.3};
  w.end = {0.7, 0.5, 0.3};
  w.radius = wire_radius;
  embed_wire(in.wires, lat, w);
  in.cpml = CpmlParams{0.3, 1, 1, 1e-3, 3, 1};
  in.waveforms.push_back(ramp());
  const int p = lat.pml;
  in.sources.push_back({SourceKind::current, EdgeRef{2, {p + 5, p + 5, p + 5}, 1}, 0, 0});
  in.probes.push_back({ProbeKind::current, {EdgeRef{2, {p + 5, p + 5, p + 5}, 1}}, "i"});
  const double f = wire_stability_factor(std::vector<WireSegment>{w}, lat.delta);
  in.dt = courant_dt(lat.delta, 0.99) * std::sqrt(std::min(1.0, f));
  return in;
}

}  // namespace

TEST_CASE("stability factor of plain and scaled materials") {
  Lattice lat(6, 6, 6, 0.1, 0);
  MaterialMap map(lat);
  WireEmbedding none;
  CHECK(stability_factor(map, none) == 1.0);
  paint_block(map, Box{{0, 0, 0}, {0.6, 0.6, 0.6}}, 4, 0);
  // Vacuum edges remain on the outer walls, so the minimum stays at 1.
  CHECK(stability_factor(map, none) == doctest::Approx(1.0));
  WireEmbedding w;
  WireSegment seg;
  seg.start = {0.3, 0.3, 0.1};
  seg.end = {0.3, 0.3, 0.5};
  seg.radius = 0.04;
  embed_wire(w, lat, seg);
  MaterialMap scaled(lat);
  apply_wire_embedding(scaled, w);
  const double m = wire_scale_factor(0.1, 0.023, 0.04);
  REQUIRE(m > 1);
  CHECK(stability_factor(scaled, w) == doctest::Approx(1 / m).epsilon(1e-12));
}

TEST_CASE("time step above the scaled Courant limit is rejected") {
  SimulationInput in = full_input(0.04);
  const double m = wire_scale_factor(0.1, 0.023, 0.04);
  CHECK_NOTHROW(Simulation{in});
  in.dt = courant_dt(0.1, 0.99);
  CHECK(in.dt > courant_dt(0.1, 1) / std::sqrt(m));
  CHECK_THROWS_AS(Simulation{in}, ParameterError);
  in.dt = 0;
  CHECK_THROWS_AS(Simulation{in}, ParameterError);
}

TEST_CASE("run records at t = 0 and every k steps") {
  Simulation sim(full_input(0.003));
  std::vector<double> times;
  const RunReport rep = run_simulation(sim, 10, 3, [&](double t, const std::vector<double>& v) {
    CHECK(v.size() == 1);
    times.push_back(t);
  });
  CHECK(rep.steps == 10);
  CHECK(rep.records == 4);
  CHECK(rep.failed_step == -1);
  REQUIRE(times.size() == 4);
  for (int r = 0; r < 4; ++r) CHECK(times[r] == doctest::Approx(3 * r * sim.dt()).epsilon(1e-14));
  CHECK(sim.steps_done() == 10);
}

TEST_CASE("non-finite fields stop the run") {
  Simulation sim(full_input(0.003));
  const Lattice& lat = sim.lattice();
  const std::size_t id = lat.index(lat.pml + 2, lat.pml + 2, lat.pml + 7);
  const RunReport rep = run_simulation(sim, 50, 5, [&](double t, const std::vector<double>&) {
    if (t > 0) sim.fields().hx[id] = std::numeric_limits<double>::infinity();
  });
  CHECK(rep.failed_step == 10);
  CHECK(rep.records == 2);
  CHECK(rep.steps == 10);
}

TEST_CASE("results do not depend on the thread count") {
  auto run = [](int threads) {
    set_thread_count(threads);
    Simulation sim(full_input(0.003));
    std::vector<double> out;
    for (int n = 0; n < 120; ++n) {
      sim.step();
      out.push_back(sim.sample()[0]);
    }
    CHECK(sim.forced_edges_zero());
    return std::make_pair(out, sim.fields());
  };
  const auto a = run(1);
  const auto b = run(4);
  set_thread_count(0);
  CHECK(a.first == b.first);
  for (int x = 0; x < 3; ++x) {
    CHECK(a.second.e(x) == b.second.e(x));
    CHECK(a.second.h(x) == b.second.h(x));
  }
}

TEST_CASE("probe names and sampling") {
  Simulation sim(full_input(0.003));
  CHECK(sim.probe_names() == std::vector<std::string>{"i"});
  CHECK(sim.sample() == std::vector<double>{0.0});
  CHECK(sim.cpml() != nullptr);
  CHECK(sim.ade() != nullptr);
  CHECK(sim.time() == 0.0);
  sim.step();
  CHECK(sim.time() == sim.dt());
}
