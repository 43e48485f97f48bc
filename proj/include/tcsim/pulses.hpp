#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tcsim/device_model.hpp"

namespace tcsim {

enum class Channel { z_q1, z_q2, z_c, xy_q1, xy_q2 };
enum class Shape { half_cosine, square, constant, virtual_z };

std::string to_string(Channel c);
std::string to_string(Shape s);
Channel channel_from_string(const std::string& s);
Shape shape_from_string(const std::string& s);

bool is_flux(Channel c);
Mode flux_mode(Channel c);  // z channels only

struct PulseSegment {
  Shape shape = Shape::constant;
  Channel channel = Channel::z_c;
  double start = 0.0;      // s
  double duration = 0.0;   // s
  double amplitude = 0.0;  // V for z channels, rad/s Rabi rate for xy
  double phase = 0.0;      // rad, xy and virtual-z
  double rise = 0.0;       // s, square only
  double drive_frequency = 0.0;  // rad/s, xy only

  double end() const { return start + duration; }
  /// Envelope at time t measured from the segment start.
  double envelope(double t) const;
};

PulseSegment half_cosine_segment(double amplitude, double duration, Channel channel = Channel::z_c,
                                 double start = 0.0);
PulseSegment square_segment(double amplitude, double duration, double rise,
                            Channel channel = Channel::z_c, double start = 0.0);
PulseSegment constant_segment(double amplitude, double duration, Channel channel, double start = 0.0);
PulseSegment virtual_z_segment(Channel channel, double phase, double at);

class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(double duration) : duration_(duration) {}

  Schedule& add(const PulseSegment& seg);
  const std::vector<PulseSegment>& segments() const { return segments_; }
  double duration() const { return duration_; }
  void set_duration(double d);

  /// Throws SimError(schedule) if segments on one channel overlap.
  void validate() const;

 private:
  double duration_ = 0.0;
  std::vector<PulseSegment> segments_;
};

struct DriveSample {
  double rabi = 0.0;       // rad/s
  double phase = 0.0;      // rad
  double frequency = 0.0;  // rad/s
};

struct FrameUpdate {
  Channel channel;
  double time;
  double phase;
};

struct SampledControl {
  double dt = 0.0;
  std::size_t steps = 0;
  std::array<std::vector<double>, 3> flux;        // indexed by Mode, volts
  std::array<std::vector<DriveSample>, 2> drive;  // xy_q1, xy_q2
  std::vector<FrameUpdate> frame_updates;

  double duration() const { return dt * static_cast<double>(steps); }
  bool has_drive() const;
  /// Controls held at V = 0 and no drive.
  static SampledControl idle(double duration, double dt);
};

std::size_t sample_count(double duration, double dt);
SampledControl sample_schedule(const Schedule& schedule, double dt);

/// Single-pole line model: step response 1 + fraction * exp(-t / time_constant).
struct DistortionFilter {
  double fraction = 0.0;
  double time_constant = 30e-9;
};

SampledControl distortion_model(const SampledControl& samples, const DistortionFilter& filter,
                                bool invert);
std::vector<double> apply_filter(const std::vector<double>& x, const DistortionFilter& filter,
                                 double dt, bool invert);

void write_schedule(std::ostream& os, const Schedule& schedule);
Schedule read_schedule(std::istream& is);

enum class CzFamily { adiabatic, diabatic };
std::string to_string(CzFamily f);
CzFamily cz_family_from_string(const std::string& s);

/// Coupler-only half-cosine flux excursion.
Schedule adiabatic_cz_schedule(double v_b, double duration);
/// Square excursions on the coupler (v_b) and Q2 (v_q) with cosine edges.
Schedule diabatic_cz_schedule(double v_b, double v_q, double duration, double rise);
Schedule cz_schedule(CzFamily family, double v_b, double v_q, double duration, double rise);

}  // namespace tcsim
