#pragma once

// Insulation breakdown on a voltage time series.

#include <optional>
#include <span>
#include <string>

namespace surge {

struct BreakdownModel {
  enum class Kind { disruptive_effect, leader_progression };
  Kind kind = Kind::disruptive_effect;
  // disruptive effect: DE = sum max(|v| - v0, 0)^k dt >= de_crit
  double v0 = 0;
  double k = 1;
  double de_crit = 0;
  // leader progression: dl/dt = k_leader |v| (|v| / (gap - l) - e0)
  double gap_length = 0;       // m
  double e0 = 520e3;           // V/m
  double k_leader = 1.3e-6;    // m^2 / (V^2 s)
};

void check_breakdown_model(const BreakdownModel& m);

// Parses a JSON parameter file, e.g.
//   {"kind": "disruptive_effect", "v0": 400e3, "k": 1, "de_crit": 0.2}
//   {"kind": "leader_progression", "gap_length": 3.0}
BreakdownModel parse_breakdown_model(const std::string& json_text);

// Time of the first sample n (t = n dt) at which breakdown is reached.
std::optional<double> evaluate_breakdown(std::span<const double> v, double dt,
                                         const BreakdownModel& m);

}  // namespace surge
