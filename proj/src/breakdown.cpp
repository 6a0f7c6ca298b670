#include "surge/breakdown.hpp"

#include <cmath>

#include <json.hpp>

#include "surge/errors.hpp"

namespace surge {

void check_breakdown_model(const BreakdownModel& m) {
  if (m.kind == BreakdownModel::Kind::disruptive_effect) {
    if (!(m.v0 >= 0)) throw ParameterError("v0 must be non-negative");
    if (!(m.k >= 1)) throw ParameterError("k must be at least 1");
    if (!(m.de_crit > 0)) throw ParameterError("de_crit must be positive");
  } else {
    if (!(m.gap_length > 0)) throw ParameterError("gap_length must be positive");
    if (!(m.e0 > 0)) throw ParameterError("e0 must be positive");
    if (!(m.k_leader > 0)) throw ParameterError("k_leader must be positive");
  }
}

BreakdownModel parse_breakdown_model(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("breakdown parameters: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("breakdown parameters must be a JSON object");
  BreakdownModel m;
  const std::string kind = j.value("kind", std::string("disruptive_effect"));
  if (kind == "disruptive_effect")
    m.kind = BreakdownModel::Kind::disruptive_effect;
  else if (kind == "leader_progression")
    m.kind = BreakdownModel::Kind::leader_progression;
  else
    throw ParameterError("unknown breakdown kind '" + kind + "'");
  try {
    m.v0 = j.value("v0", m.v0);
    m.k = j.value("k", m.k);
    m.de_crit = j.value("de_crit", m.de_crit);
    m.gap_length = j.value("gap_length", m.gap_length);
    m.e0 = j.value("e0", m.e0);
    m.k_leader = j.value("k_leader", m.k_leader);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("breakdown parameters: ") + e.what());
  }
  check_breakdown_model(m);
  return m;
}

std::optional<double> evaluate_breakdown(std::span<const double> v, double dt,
                                         const BreakdownModel& m) {
  if (!(dt > 0)) throw ParameterError("dt must be positive");
  if (v.empty()) throw ParameterError("voltage series is empty");
  check_breakdown_model(m);
  if (m.kind == BreakdownModel::Kind::disruptive_effect) {
    double de = 0;
    for (std::size_t n = 0; n < v.size(); ++n) {
      const double over = std::abs(v[n]) - m.v0;
      if (over > 0) de += std::pow(over, m.k) * dt;
      if (de >= m.de_crit) return double(n) * dt;
    }
    return std::nullopt;
  }
  // Leader progression, explicit Euler.
  double len = 0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double u = std::abs(v[n]);
    const double rest = m.gap_length - len;
    const double vel = std::max(0.0, m.k_leader * u * (u / rest - m.e0));
    len += vel * dt;
    if (len >= m.gap_length) return double(n) * dt;
  }
  return std::nullopt;
}

}  // namespace surge
