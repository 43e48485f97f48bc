#include "tcsim/tuneup.hpp"

#include <cmath>
#include <limits>

#include "tcsim/units.hpp"

namespace tcsim {

namespace {

constexpr double invalid_penalty = 2.0;

double snap(double duration, double dt) { return std::max(1.0, std::round(duration / dt)) * dt; }

}  // namespace

CzCalibration evaluate_cz(const SystemModel& model, CzFamily family, double v_b, double v_q, double duration,
                          double rise, double dt) {
  CzCalibration c;
  c.family = family;
  c.v_b = v_b;
  c.v_q = family == CzFamily::diabatic ? v_q : 0.0;
  c.duration = snap(duration, dt);
  c.rise = family == CzFamily::diabatic ? rise : 0.0;
  c.gate = simulate_gate(model, sample_schedule(c.schedule(), dt));
  c.virtual_z = compensation_for(c.gate);
  c.infidelity = 1.0 - average_gate_fidelity(virtual_z_compensation(c.gate), cz_target());
  c.objective = c.infidelity;
  return c;
}

namespace {

// First V_b where the unwrapped conditional phase reaches pi in magnitude.
std::optional<double> first_pi_crossing(const Map2D& scan) {
  double unwrapped = 0.0;
  for (std::size_t i = 0; i < scan.x.size(); ++i) {
    const double raw = scan.at(i, 0);
    if (!std::isfinite(raw)) return std::nullopt;
    const double before = unwrapped;
    unwrapped = i == 0 ? raw : unwrapped + wrap_phase(raw - scan.at(i - 1, 0));
    if (i > 0 && std::abs(unwrapped) >= pi) {
      const double t = (pi - std::abs(before)) / (std::abs(unwrapped) - std::abs(before));
      return scan.x[i - 1] + t * (scan.x[i] - scan.x[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace

CzCalibration tune_adiabatic_cz(const SystemModel& model, const AdiabaticTuneOptions& opt, Exec exec) {
  PhaseScanOptions scan;
  scan.family = CzFamily::adiabatic;
  scan.v_b = opt.scan_v_b;
  scan.dt = opt.dt;
  std::optional<double> start;
  double duration = snap(opt.duration, opt.dt);
  while (true) {
    scan.duration = duration;
    start = first_pi_crossing(conditional_phase_scan(model, scan, exec));
    if (start || !opt.grow_duration) break;
    duration = snap(duration + opt.duration_step, opt.dt);
    if (duration > opt.max_duration) break;
  }
  if (!start)
    throw SimError(ErrorCode::calibration, "no pi crossing of the conditional phase up to " +
                                               std::to_string(to_ns(std::min(duration, opt.max_duration))) + " ns");

  const double dt = opt.dt;
  auto run = [&](const std::vector<double>& x) {
    const double t = opt.optimize_duration ? x[1] * 1e-9 : duration;
    if (!(t > 0.0) || !(x[0] > 0.0)) return invalid_penalty;
    try {
      return evaluate_cz(model, CzFamily::adiabatic, x[0], 0.0, t, 0.0, dt).objective;
    } catch (const SimError&) {
      return invalid_penalty;
    }
  };
  NMConfig nm = opt.nm;
  std::vector<double> x0{*start};
  if (opt.optimize_duration) x0.push_back(to_ns(duration));
  if (nm.scale.empty()) nm.scale = opt.optimize_duration ? std::vector<double>{0.005, 2.0} : std::vector<double>{0.005};
  NMResult r = nelder_mead(run, x0, nm);
  CzCalibration c = evaluate_cz(model, CzFamily::adiabatic, r.x[0], 0.0,
                                opt.optimize_duration ? r.x[1] * 1e-9 : duration, 0.0, dt);
  c.optimization = std::move(r);
  c.scan_duration = duration;
  c.start_v_b = *start;
  return c;
}

CzCalibration tune_diabatic_cz(const SystemModel& model, const DiabaticTuneOptions& opt, Exec exec) {
  PhaseScanOptions ps;
  ps.family = CzFamily::diabatic;
  ps.v_b = opt.v_b;
  ps.v_q = opt.v_q;
  ps.duration = snap(opt.duration, opt.dt);
  ps.rise = opt.rise;
  ps.dt = opt.dt;
  const Map2D phase = conditional_phase_scan(model, ps, exec);
  LeakageMapOptions lo;
  lo.v_b = opt.v_b;
  lo.v_q = opt.v_q;
  lo.duration = ps.duration;
  lo.rise = opt.rise;
  lo.dt = opt.dt;
  const LeakageMaps leak = leakage_map(model, lo, exec);

  double best = std::numeric_limits<double>::infinity();
  std::size_t bx = 0, by = 0;
  for (std::size_t iy = 0; iy < opt.v_q.size(); ++iy)
    for (std::size_t ix = 0; ix < opt.v_b.size(); ++ix) {
      const double ph = phase.at(ix, iy);
      const double l = leak.noncomputational.at(ix, iy);
      if (!std::isfinite(ph) || l > opt.leakage_threshold) continue;
      const double score = std::abs(wrap_phase(ph - pi)) / pi + opt.leakage_weight * l;
      if (score < best) {
        best = score;
        bx = ix;
        by = iy;
      }
    }
  if (!std::isfinite(best)) throw SimError(ErrorCode::calibration, "no low-leakage point on the phase map");

  auto objective = [&](const CzCalibration& c) { return c.infidelity + opt.leakage_weight * c.gate.leakage; };
  auto run = [&](const std::vector<double>& x) {
    const double t = x[2] * 1e-9;
    if (!(t > 2.0 * opt.rise)) return invalid_penalty;
    try {
      return objective(evaluate_cz(model, CzFamily::diabatic, x[0], x[1], t, opt.rise, opt.dt));
    } catch (const SimError&) {
      return invalid_penalty;
    }
  };
  NMConfig nm = opt.nm;
  if (nm.scale.empty()) nm.scale = {0.01, 0.01, 1.0};
  NMResult r = nelder_mead(run, {opt.v_b[bx], opt.v_q[by], to_ns(ps.duration)}, nm);
  CzCalibration c = evaluate_cz(model, CzFamily::diabatic, r.x[0], r.x[1], r.x[2] * 1e-9, opt.rise, opt.dt);
  c.objective = objective(c);
  c.optimization = std::move(r);
  c.scan_duration = ps.duration;
  c.start_v_b = opt.v_b[bx];
  c.start_v_q = opt.v_q[by];
  return c;
}

}  // namespace tcsim
