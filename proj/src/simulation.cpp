#include "surge/simulation.hpp"

#include <cmath>

#include "surge/constants.hpp"
#include "surge/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace surge {

double stability_factor(const MaterialMap& map, const WireEmbedding& wires) {
  double eps_min = 1, mu_min = 1;
  for (int a = 0; a < 3; ++a) {
    const auto& eps = map.eps[a];
    for (std::size_t id = 0; id < eps.size(); ++id)
      if (eps[id] < eps_min * kEps0 && !wires.is_forced(a, id)) eps_min = eps[id] / kEps0;
    for (double mu : map.mu[a]) mu_min = std::min(mu_min, mu / kMu0);
  }
  return eps_min * mu_min;
}

Simulation::Simulation(SimulationInput in)
    : materials_(std::move(in.materials)),
      wires_(std::move(in.wires)),
      waves_(std::move(in.waveforms)),
      sources_(std::move(in.sources)),
      probes_(std::move(in.probes)),
      dt_(in.dt) {
  const Lattice& lat = materials_.lattice;
  if (!(dt_ > 0)) throw ParameterError("time step must be positive");
  for (const auto& s : sources_) {
    if (s.waveform < 0 || std::size_t(s.waveform) >= waves_.size())
      throw ParameterError("source refers to a missing waveform");
    const std::size_t id = lat.index(s.edge.lower.i, s.edge.lower.j, s.edge.lower.k);
    if (wires_.is_forced(s.edge.axis, id))
      throw ValidationError(0, "source edge is shorted by a wire");
  }
  for (const auto& l : in.lumped) {
    const std::size_t id = lat.index(l.edge.lower.i, l.edge.lower.j, l.edge.lower.k);
    if (wires_.is_forced(l.edge.axis, id))
      throw ValidationError(0, "lumped element edge is shorted by a wire");
  }
  apply_wire_embedding(materials_, wires_);
  load_lumped(materials_, sources_, in.lumped);
  bool dispersive = false;
  for (const auto& m : in.media) dispersive = dispersive || !m.poles.empty();
  std::vector<double> extra;
  if (dispersive) {
    ade_ = std::make_unique<AdeState>(materials_, in.media, dt_);
    extra = ade_->eps_extra();
  }
  if (dt_ > courant_dt(lat.delta, 1.0) * std::sqrt(stability_factor(materials_, wires_)) * (1 + 1e-12))
    throw ParameterError("time step exceeds the Courant limit of the scaled materials");
  coeffs_ = build_coefficients(materials_, dt_, extra);
  apply_forced_edges(coeffs_, wires_);
  if (in.cpml && lat.pml > 0) cpml_ = std::make_unique<CpmlState>(lat, *in.cpml, dt_);
  fields_ = FieldSet(lat);
}

void Simulation::step() {
  const double t = time();
  step_h(fields_, coeffs_, cpml_.get());
  if (ade_) ade_->save(fields_);
  step_e(fields_, coeffs_, cpml_.get());
  inject_sources(fields_, coeffs_, sources_, waves_, t + 0.5 * dt_, t + dt_);
  if (ade_) ade_->update(fields_, coeffs_);
  impose_sources(fields_, lattice(), sources_, waves_, t + dt_);
  ++steps_;
}

std::vector<std::string> Simulation::probe_names() const {
  std::vector<std::string> out;
  for (const auto& p : probes_) out.push_back(p.name);
  return out;
}

std::vector<double> Simulation::sample() const {
  std::vector<double> out;
  out.reserve(probes_.size());
  for (const auto& p : probes_) out.push_back(measure(fields_, lattice(), p));
  return out;
}

bool Simulation::forced_edges_zero() const {
  for (int a = 0; a < 3; ++a)
    for (std::size_t id : wires_.forced[a])
      if (fields_.e(a)[id] != 0.0) return false;
  return true;
}

void set_thread_count(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

RunReport run_simulation(Simulation& sim, long n_steps, long record_every,
                         const std::function<void(double, const std::vector<double>&)>& on_record,
                         const std::function<void(double)>& on_progress) {
  RunReport rep;
  if (record_every < 1) record_every = 1;
  auto record = [&]() -> bool {
    std::vector<double> v = sim.sample();
    for (double x : v)
      if (!std::isfinite(x)) return false;
    if (!all_finite(sim.fields())) return false;
    if (on_record) on_record(sim.time(), v);
    ++rep.records;
    return true;
  };
  if (!record()) {
    rep.failed_step = 0;
    return rep;
  }
  const long progress_every = std::max(1L, n_steps / 20);
  for (long n = 1; n <= n_steps; ++n) {
    sim.step();
    ++rep.steps;
    if (n % record_every == 0 && !record()) {
      rep.failed_step = n;
      return rep;
    }
    if (on_progress && n % progress_every == 0) on_progress(double(n) / double(n_steps));
  }
  return rep;
}

}  // namespace surge
