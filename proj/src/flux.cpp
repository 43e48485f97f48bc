#include <cmath>

#include "tcsim/device_model.hpp"
#include "tcsim/errors.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

namespace {

void require_tunable(const FluxElement& e, Mode m) {
  if (!e.tunable)
    throw SimError(ErrorCode::unsupported_control, to_string(m) + " is not flux tunable");
  if (!(e.v_period > 0.0)) throw SimError(ErrorCode::config, "flux period must be positive");
}

}  // namespace

double flux_to_frequency(const FluxMap& map, const DeviceParams& params, Mode m, double volts) {
  const FluxElement& e = map[m];
  require_tunable(e, m);
  const double wmax = params.omega_max[index_of(m)];
  const double a = params.alpha[index_of(m)];
  const double c = std::cos(pi * (volts + e.v_offset) / e.v_period);
  return (wmax - a) * std::sqrt(std::abs(c)) + a;
}

double frequency_to_flux(const FluxMap& map, const DeviceParams& params, Mode m, double omega) {
  const FluxElement& e = map[m];
  require_tunable(e, m);
  const double wmax = params.omega_max[index_of(m)];
  const double a = params.alpha[index_of(m)];
  if (omega > wmax || omega < a)
    throw SimError(ErrorCode::out_of_range,
                   to_string(m) + " cannot reach " + std::to_string(to_ghz(omega)) + " GHz");
  const double r = (omega - a) / (wmax - a);
  return e.v_period / pi * std::acos(std::min(1.0, r * r)) - e.v_offset;
}

FluxMap FluxMap::for_idle(const DeviceParams& params, const Frequencies& idle, double v_period) {
  FluxMap map;
  for (Mode m : all_modes) {
    FluxElement& e = map[m];
    e.tunable = true;
    e.v_period = v_period;
    e.v_offset = 0.0;
    e.v_offset = frequency_to_flux(map, params, m, idle[m]);
  }
  return map;
}

Frequencies Device::nominal_idle() { return {ghz(4.283), ghz(4.679), ghz(5.419)}; }

Device Device::nominal() {
  Device d;
  d.params = DeviceParams::nominal();
  d.flux = FluxMap::for_idle(d.params, nominal_idle());
  return d;
}

Frequencies Device::frequencies_at(const std::array<double, 3>& volts) const {
  Frequencies f;
  for (Mode m : all_modes) {
    const FluxElement& e = flux[m];
    if (e.tunable) {
      f[m] = flux_to_frequency(flux, params, m, volts[index_of(m)]);
    } else {
      f[m] = params.omega_max[index_of(m)];
    }
  }
  return f;
}

}  // namespace tcsim
