#include "surge/excitation.hpp"

#include <algorithm>
#include <cmath>

#include "surge/errors.hpp"

namespace surge {

double heidler_eta(const HeidlerTerm& t) {
  return std::exp(-(t.tau1 / t.tau2) * std::pow(t.n * t.tau2 / t.tau1, 1.0 / t.n));
}

void check_heidler(const HeidlerTerm& t) {
  if (!std::isfinite(t.i0)) throw ParameterError("heidler peak must be finite");
  if (!(t.tau1 > 0) || !(t.tau2 > 0)) throw ParameterError("heidler time constants must be positive");
  if (!(t.n >= 1)) throw ParameterError("heidler steepness n must be >= 1");
  const double eta = heidler_eta(t);
  if (!(eta > 0 && eta <= 1)) throw ParameterError("heidler correction factor out of (0, 1]");
}

double heidler_eval(std::span<const HeidlerTerm> terms, double t) {
  if (!(t > 0)) return 0.0;
  double sum = 0;
  for (const auto& h : terms) {
    const double xn = std::pow(t / h.tau1, h.n);
    sum += h.i0 / heidler_eta(h) * xn / (1 + xn) * std::exp(-t / h.tau2);
  }
  return sum;
}

void check_waveform(const Waveform& w) {
  if (w.kind == Waveform::Kind::sampled) {
    if (w.values.empty()) throw ValidationError(0, "function '" + w.name + "' has no samples");
    if (!(w.sample_dt > 0)) throw ValidationError(0, "function '" + w.name + "' needs a positive sample interval");
  } else {
    if (w.terms.empty()) throw ValidationError(0, "function '" + w.name + "' has no heidler terms");
    for (const auto& t : w.terms) check_heidler(t);
  }
}

double waveform_sample(const Waveform& w, double t) {
  if (w.kind == Waveform::Kind::heidler_sum) return heidler_eval(w.terms, t);
  if (w.values.empty()) throw ValidationError(0, "function '" + w.name + "' has no samples");
  if (t <= 0) return w.values.front();
  const double x = t / w.sample_dt;
  const double fl = std::floor(x);
  if (fl >= double(w.values.size() - 1)) return w.values.back();
  const auto i = static_cast<std::size_t>(fl);
  const double frac = x - fl;
  if (frac == 0) return w.values[i];
  return w.values[i] + frac * (w.values[i + 1] - w.values[i]);
}

namespace {

std::size_t edge_index(const Lattice& lat, const EdgeRef& e) {
  return lat.index(e.lower.i, e.lower.j, e.lower.k);
}

}  // namespace

void load_lumped(MaterialMap& map, std::span<const Source> sources,
                 std::span<const LumpedElement> lumped) {
  const double d = map.lattice.delta;
  for (const auto& s : sources) {
    if (s.r_internal < 0) throw ParameterError("source resistance must be non-negative");
    if (s.r_internal > 0 && (s.kind == SourceKind::current || s.kind == SourceKind::voltage))
      map.sigma[s.edge.axis][edge_index(map.lattice, s.edge)] += 1.0 / (s.r_internal * d);
  }
  for (const auto& l : lumped) {
    if (!(l.value > 0)) throw ParameterError("lumped element value must be positive");
    const std::size_t id = edge_index(map.lattice, l.edge);
    if (l.kind == LumpedKind::resistor)
      map.sigma[l.edge.axis][id] += 1.0 / (l.value * d);
    else
      map.eps[l.edge.axis][id] += l.value / d;
  }
}

void inject_sources(FieldSet& f, const UpdateCoefficients& c, std::span<const Source> sources,
                    std::span<const Waveform> waves, double t_half, double t_next) {
  const Lattice& lat = c.lattice;
  const double d = lat.delta;
  for (const auto& s : sources) {
    const std::size_t id = edge_index(lat, s.edge);
    double& e = f.e(s.edge.axis)[id];
    const double cb = c.cb[s.edge.axis][id];
    switch (s.kind) {
      case SourceKind::current:
        e -= cb * s.edge.sign * waveform_sample(waves[s.waveform], t_half) / d;
        break;
      case SourceKind::voltage:
        if (s.r_internal > 0)
          e -= cb * s.edge.sign * waveform_sample(waves[s.waveform], t_half) / s.r_internal / d;
        break;
      case SourceKind::soft_e:
        e += s.edge.sign * waveform_sample(waves[s.waveform], t_next);
        break;
      case SourceKind::hard_e:
        break;
    }
  }
}

void impose_sources(FieldSet& f, const Lattice& lat, std::span<const Source> sources,
                    std::span<const Waveform> waves, double t_next) {
  for (const auto& s : sources) {
    const std::size_t id = edge_index(lat, s.edge);
    if (s.kind == SourceKind::hard_e)
      f.e(s.edge.axis)[id] = s.edge.sign * waveform_sample(waves[s.waveform], t_next);
    else if (s.kind == SourceKind::voltage && s.r_internal == 0)
      f.e(s.edge.axis)[id] = -s.edge.sign * waveform_sample(waves[s.waveform], t_next) / lat.delta;
  }
}

void apply_sources(FieldSet& f, const UpdateCoefficients& c, std::span<const Source> sources,
                   std::span<const Waveform> waves, double t, double dt) {
  inject_sources(f, c, sources, waves, t + 0.5 * dt, t + dt);
  impose_sources(f, c.lattice, sources, waves, t + dt);
}

}  // namespace surge
