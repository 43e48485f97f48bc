#pragma once

#include <cmath>
#include <numbers>

namespace tcsim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Interface units (GHz, MHz, ns, us) to internal rad/s and s.
constexpr double ghz(double f) { return two_pi * 1e9 * f; }
constexpr double mhz(double f) { return two_pi * 1e6 * f; }
constexpr double ns(double t) { return t * 1e-9; }
constexpr double us(double t) { return t * 1e-6; }

constexpr double to_ghz(double omega) { return omega / (two_pi * 1e9); }
constexpr double to_mhz(double omega) { return omega / (two_pi * 1e6); }
constexpr double to_ns(double t) { return t * 1e9; }
constexpr double to_us(double t) { return t * 1e6; }

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::remainder(x, two_pi);
  if (y <= -pi) y += two_pi;
  return y;
}

}  // namespace tcsim
