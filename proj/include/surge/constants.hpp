#pragma once

#include <cmath>
#include <numbers>

namespace surge {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMu0 = 1.25663706212e-6;
inline constexpr double kEps0 = 8.8541878128e-12;
inline constexpr double kPi = std::numbers::pi;

// Free-space wave impedance sqrt(mu0/eps0).
inline double eta0() { return std::sqrt(kMu0 / kEps0); }

}  // namespace surge
