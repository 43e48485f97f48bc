#include "tcsim/pulses.hpp"

#include <algorithm>
#include <cmath>

#include "tcsim/errors.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

std::string to_string(Channel c) {
  switch (c) {
    case Channel::z_q1: return "z_q1";
    case Channel::z_q2: return "z_q2";
    case Channel::z_c: return "z_c";
    case Channel::xy_q1: return "xy_q1";
    case Channel::xy_q2: return "xy_q2";
  }
  return "?";
}

std::string to_string(Shape s) {
  switch (s) {
    case Shape::half_cosine: return "half_cosine";
    case Shape::square: return "square";
    case Shape::constant: return "constant";
    case Shape::virtual_z: return "virtual_z";
  }
  return "?";
}

Channel channel_from_string(const std::string& s) {
  for (Channel c : {Channel::z_q1, Channel::z_q2, Channel::z_c, Channel::xy_q1, Channel::xy_q2})
    if (to_string(c) == s) return c;
  throw SimError(ErrorCode::schedule, "unknown channel '" + s + "'");
}

Shape shape_from_string(const std::string& s) {
  for (Shape x : {Shape::half_cosine, Shape::square, Shape::constant, Shape::virtual_z})
    if (to_string(x) == s) return x;
  throw SimError(ErrorCode::schedule, "unknown shape '" + s + "'");
}

bool is_flux(Channel c) { return c == Channel::z_q1 || c == Channel::z_q2 || c == Channel::z_c; }

Mode flux_mode(Channel c) {
  switch (c) {
    case Channel::z_q1: return Mode::q1;
    case Channel::z_q2: return Mode::q2;
    case Channel::z_c: return Mode::coupler;
    default: throw SimError(ErrorCode::unsupported_control, "not a flux channel: " + to_string(c));
  }
}

double PulseSegment::envelope(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  switch (shape) {
    case Shape::half_cosine:
      return amplitude * 0.5 * (1.0 - std::cos(two_pi * t / duration));
    case Shape::square: {
      if (rise > 0.0) {
        if (t < rise) return amplitude * 0.5 * (1.0 - std::cos(pi * t / rise));
        if (t > duration - rise) return amplitude * 0.5 * (1.0 - std::cos(pi * (duration - t) / rise));
      }
      return amplitude;
    }
    case Shape::constant: return amplitude;
    case Shape::virtual_z: return 0.0;
  }
  return 0.0;
}

PulseSegment half_cosine_segment(double amplitude, double duration, Channel channel, double start) {
  if (!(duration > 0.0)) throw SimError(ErrorCode::invalid_shape, "half-cosine needs positive duration");
  PulseSegment s;
  s.shape = Shape::half_cosine;
  s.channel = channel;
  s.start = start;
  s.duration = duration;
  s.amplitude = amplitude;
  return s;
}

PulseSegment square_segment(double amplitude, double duration, double rise, Channel channel,
                            double start) {
  if (!(duration > 0.0)) throw SimError(ErrorCode::invalid_shape, "square pulse needs positive duration");
  if (rise < 0.0 || 2.0 * rise > duration)
    throw SimError(ErrorCode::invalid_shape, "rise time must satisfy 0 <= 2*rise <= duration");
  PulseSegment s;
  s.shape = Shape::square;
  s.channel = channel;
  s.start = start;
  s.duration = duration;
  s.amplitude = amplitude;
  s.rise = rise;
  return s;
}

PulseSegment constant_segment(double amplitude, double duration, Channel channel, double start) {
  if (duration < 0.0) throw SimError(ErrorCode::invalid_shape, "negative duration");
  PulseSegment s;
  s.shape = Shape::constant;
  s.channel = channel;
  s.start = start;
  s.duration = duration;
  s.amplitude = amplitude;
  return s;
}

PulseSegment virtual_z_segment(Channel channel, double phase, double at) {
  PulseSegment s;
  s.shape = Shape::virtual_z;
  s.channel = channel;
  s.start = at;
  s.duration = 0.0;
  s.phase = phase;
  return s;
}

Schedule& Schedule::add(const PulseSegment& seg) {
  if (seg.start < 0.0) throw SimError(ErrorCode::schedule, "negative start time");
  if (seg.duration < 0.0) throw SimError(ErrorCode::schedule, "negative duration");
  if (seg.shape == Shape::virtual_z && seg.duration != 0.0)
    throw SimError(ErrorCode::schedule, "virtual-z segments have zero duration");
  if (seg.shape == Shape::square && (seg.rise < 0.0 || 2.0 * seg.rise > seg.duration))
    throw SimError(ErrorCode::invalid_shape, "rise time must satisfy 0 <= 2*rise <= duration");
  segments_.push_back(seg);
  duration_ = std::max(duration_, seg.end());
  return *this;
}

void Schedule::set_duration(double d) {
  for (const auto& s : segments_)
    if (s.end() > d * (1.0 + 1e-12)) throw SimError(ErrorCode::schedule, "duration shorter than a segment");
  duration_ = d;
}

void Schedule::validate() const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& a = segments_[i];
    if (a.shape == Shape::virtual_z) continue;
    for (std::size_t j = i + 1; j < segments_.size(); ++j) {
      const auto& b = segments_[j];
      if (b.shape == Shape::virtual_z || a.channel != b.channel) continue;
      const double tol = 1e-15;
      if (a.start < b.end() - tol && b.start < a.end() - tol)
        throw SimError(ErrorCode::schedule, "overlapping segments on " + to_string(a.channel));
    }
  }
}

bool SampledControl::has_drive() const {
  for (const auto& ch : drive)
    for (const auto& d : ch)
      if (d.rabi != 0.0) return true;
  return false;
}

SampledControl SampledControl::idle(double duration, double dt) {
  return sample_schedule(Schedule(duration), dt);
}

std::size_t sample_count(double duration, double dt) {
  if (!(dt > 0.0)) throw SimError(ErrorCode::sampling, "dt must be positive");
  const double n = std::ceil(duration / dt - 1e-9);
  return n > 0.0 ? static_cast<std::size_t>(n) : 0;
}

SampledControl sample_schedule(const Schedule& schedule, double dt) {
  schedule.validate();
  SampledControl out;
  out.dt = dt;
  out.steps = sample_count(schedule.duration(), dt);
  for (auto& f : out.flux) f.assign(out.steps, 0.0);
  for (auto& d : out.drive) d.assign(out.steps, DriveSample{});
  const double eps = 1e-9 * dt;
  for (const auto& seg : schedule.segments()) {
    if (seg.shape == Shape::virtual_z) {
      out.frame_updates.push_back({seg.channel, seg.start, seg.phase});
      continue;
    }
    for (std::size_t k = 0; k < out.steps; ++k) {
      const double t = (static_cast<double>(k) + 0.5) * dt;
      if (t < seg.start - eps || t >= seg.end() - eps) continue;
      const double local = std::max(0.0, t - seg.start);
      if (is_flux(seg.channel)) {
        out.flux[index_of(flux_mode(seg.channel))][k] = seg.envelope(local);
      } else {
        auto& d = out.drive[seg.channel == Channel::xy_q1 ? 0 : 1][k];
        d.rabi = seg.envelope(local);
        d.phase = seg.phase;
        d.frequency = seg.drive_frequency;
      }
    }
  }
  std::stable_sort(out.frame_updates.begin(), out.frame_updates.end(),
                   [](const FrameUpdate& a, const FrameUpdate& b) { return a.time < b.time; });
  return out;
}

std::vector<double> apply_filter(const std::vector<double>& x, const DistortionFilter& filter,
                                 double dt, bool invert) {
  if (!(filter.time_constant > 0.0)) throw SimError(ErrorCode::filter, "time constant must be positive");
  if (!(dt > 0.0)) throw SimError(ErrorCode::sampling, "dt must be positive");
  const double a = filter.fraction;
  const double lambda = std::exp(-dt / filter.time_constant);
  std::vector<double> y(x.size());
  double z = 0.0;
  double prev = 0.0;
  if (!invert) {
    for (std::size_t n = 0; n < x.size(); ++n) {
      z = lambda * z + x[n] - prev;
      prev = x[n];
      y[n] = x[n] + a * z;
    }
    return y;
  }
  if (a <= -1.0) throw SimError(ErrorCode::filter, "inverse filter unstable (fraction <= -1)");
  if (std::abs((lambda + a) / (1.0 + a)) >= 1.0)
    throw SimError(ErrorCode::filter, "inverse filter pole outside the unit circle");
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double xn = (x[n] - a * (lambda * z - prev)) / (1.0 + a);
    z = lambda * z + xn - prev;
    prev = xn;
    y[n] = xn;
  }
  return y;
}

SampledControl distortion_model(const SampledControl& samples, const DistortionFilter& filter,
                                bool invert) {
  SampledControl out = samples;
  for (auto& ch : out.flux) ch = apply_filter(ch, filter, samples.dt, invert);
  return out;
}

Schedule adiabatic_cz_schedule(double v_b, double duration) {
  Schedule s(duration);
  s.add(half_cosine_segment(v_b, duration, Channel::z_c));
  return s;
}

Schedule diabatic_cz_schedule(double v_b, double v_q, double duration, double rise) {
  Schedule s(duration);
  s.add(square_segment(v_b, duration, rise, Channel::z_c));
  s.add(square_segment(v_q, duration, rise, Channel::z_q2));
  return s;
}

Schedule cz_schedule(CzFamily family, double v_b, double v_q, double duration, double rise) {
  return family == CzFamily::adiabatic ? adiabatic_cz_schedule(v_b, duration)
                                       : diabatic_cz_schedule(v_b, v_q, duration, rise);
}

std::string to_string(CzFamily f) { return f == CzFamily::adiabatic ? "adiabatic" : "diabatic"; }

CzFamily cz_family_from_string(const std::string& s) {
  if (s == "adiabatic") return CzFamily::adiabatic;
  if (s == "diabatic") return CzFamily::diabatic;
  throw SimError(ErrorCode::config, "unknown CZ family '" + s + "'");
}

}  // namespace tcsim
