#pragma once

// Assembles the lattice, materials, wires, absorbing layers, dispersive
// media, sources and probes into one steppable simulation.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "surge/cpml.hpp"
#include "surge/debye.hpp"
#include "surge/excitation.hpp"
#include "surge/grid.hpp"
#include "surge/probes.hpp"
#include "surge/wires.hpp"

namespace surge {

struct SimulationInput {
  MaterialMap materials;  // painted, before wire scaling
  std::vector<DebyeMedium> media;
  WireEmbedding wires;
  std::optional<CpmlParams> cpml;
  double dt = 0;
  std::vector<Waveform> waveforms;
  std::vector<Source> sources;
  std::vector<LumpedElement> lumped;
  std::vector<Probe> probes;
};

// min eps_r * min mu_r over the updated edges and faces; the time step must
// stay below the vacuum Courant limit times its square root.
double stability_factor(const MaterialMap& map, const WireEmbedding& wires);

class Simulation {
 public:
  explicit Simulation(SimulationInput in);

  // One leapfrog step: H to n+1/2, then E (with sources and poles) to n+1.
  void step();

  long steps_done() const { return steps_; }
  double time() const { return double(steps_) * dt_; }
  double dt() const { return dt_; }
  const Lattice& lattice() const { return materials_.lattice; }
  const MaterialMap& materials() const { return materials_; }
  const UpdateCoefficients& coefficients() const { return coeffs_; }
  FieldSet& fields() { return fields_; }
  const FieldSet& fields() const { return fields_; }
  const CpmlState* cpml() const { return cpml_.get(); }
  const AdeState* ade() const { return ade_.get(); }

  std::vector<std::string> probe_names() const;
  std::vector<double> sample() const;
  // Every wire-forced edge is exactly zero.
  bool forced_edges_zero() const;

 private:
  MaterialMap materials_;  // wire-scaled and lumped-loaded
  WireEmbedding wires_;
  std::vector<Waveform> waves_;
  std::vector<Source> sources_;
  std::vector<Probe> probes_;
  UpdateCoefficients coeffs_;
  std::unique_ptr<CpmlState> cpml_;
  std::unique_ptr<AdeState> ade_;
  FieldSet fields_;
  double dt_ = 0;
  long steps_ = 0;
};

// Sets the worker count for the data-parallel kernels (0 = runtime default).
void set_thread_count(int threads);
int thread_count();

struct RunReport {
  long steps = 0;
  long records = 0;
  long failed_step = -1;  // first step whose fields went non-finite
};

// Steps `n_steps` times, calling on_record at t = 0 and every
// `record_every` steps. Stops early when the fields stop being finite.
RunReport run_simulation(Simulation& sim, long n_steps, long record_every,
                         const std::function<void(double, const std::vector<double>&)>& on_record,
                         const std::function<void(double)>& on_progress = {});

}  // namespace surge
