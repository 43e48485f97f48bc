#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcsim/evolution.hpp"

namespace tcsim {

/// Values on a grid; values(iy, ix), so one column holds a sweep of y at fixed x.
struct Map2D {
  std::string x_label;
  std::string y_label;
  std::string value_label;
  std::vector<double> x;
  std::vector<double> y;
  RMat values;

  Map2D() = default;
  Map2D(std::string xl, std::vector<double> xs, std::string yl, std::vector<double> ys, std::string vl);
  double& at(std::size_t ix, std::size_t iy) { return values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)); }
  double at(std::size_t ix, std::size_t iy) const {
    return values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix));
  }
};

std::vector<double> linspace(double start, double stop, std::size_t points);

// ---- coupler spectroscopy ----

struct SpectroscopyPoint {
  double volts = 0.0;
  double coupler_bare = 0.0;           // rad/s
  std::array<double, 3> branches{};    // dressed single-excitation frequencies, ascending
  std::array<std::string, 3> labels{};  // "100", "010", "001" or "" when mixed
};

struct AntiCrossing {
  Mode qubit = Mode::q1;
  double gap = 0.0;  // rad/s
  double volts = 0.0;
  double coupler_bare = 0.0;
};

struct SpectroscopyResult {
  std::vector<SpectroscopyPoint> points;
  std::vector<AntiCrossing> gaps;  // smallest splitting seen near each qubit
};

SpectroscopyResult coupler_spectroscopy(const Device& device, const std::vector<double>& v_grid,
                                        Exec exec = Exec::parallel);

/// Splitting of the two single-excitation branches closest to the qubit at a given coupler frequency.
double anticrossing_gap(const DeviceParams& params, const Frequencies& idle, Mode qubit, double coupler_frequency);

// ---- iSWAP chevron ----

struct ChevronOptions {
  std::vector<double> v_b;
  std::vector<double> tau;  // s, uniform
  double resonance_frequency = 0.0;
  bool decoherence = false;
  double dt = 0.1e-9;  // density path only
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
};

/// P(Q1 excited) after preparing |100> and holding the coupler at V_b for tau.
Map2D iswap_chevron(const SystemModel& model, const ChevronOptions& options, Exec exec = Exec::parallel);

struct CouplingEstimate {
  double x = 0.0;
  double coupling = 0.0;        // |g|, rad/s; 0 when unresolved
  double peak_frequency = 0.0;  // Hz
  bool resolved = false;
};

std::vector<CouplingEstimate> coupling_from_chevron(const Map2D& map);

// ---- Ramsey conditional phase ----

struct CosineFit {
  double phase = 0.0;
  double contrast = 0.0;
  double offset = 0.0;
  double residual = 0.0;
};

/// Least squares of P = offset + (contrast/2) cos(alpha + phase).
CosineFit fit_cosine(const std::vector<double>& alpha, const std::vector<double>& p);

struct RamseyOptions {
  std::vector<double> alpha;
  bool control_excited = false;
  bool decoherence = false;
  double dt = 0.1e-9;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  double min_contrast = 0.1;
};

struct RamseyTrace {
  std::vector<double> alpha;
  std::vector<double> p_excited;
  CosineFit fit;
};

RamseyTrace ramsey_conditional_phase(const SystemModel& model, const Schedule& cz, const RamseyOptions& options);

std::vector<double> default_alpha_grid(std::size_t points = 24);

struct PhaseScanOptions {
  CzFamily family = CzFamily::adiabatic;
  std::vector<double> v_b;
  std::vector<double> v_q{0.0};
  double duration = 30e-9;
  double rise = 2e-9;
  double dt = 0.1e-9;
  std::vector<double> alpha = default_alpha_grid();
  bool decoherence = false;
};

/// phi_X - phi_Id over (V_b, V_q); NaN where either fringe lacks contrast.
Map2D conditional_phase_scan(const SystemModel& model, const PhaseScanOptions& options, Exec exec = Exec::parallel);

// ---- leakage map ----

struct LeakageMapOptions {
  std::vector<double> v_b;
  std::vector<double> v_q;
  double duration = 18e-9;
  double rise = 2e-9;
  double dt = 0.1e-9;
  bool decoherence = false;
};

struct LeakageMaps {
  Map2D ground_increase;   // P(lower-frequency qubit in |0>) after preparing |101>
  Map2D noncomputational;  // population outside |000>,|001>,|100>,|101>
};

LeakageMaps leakage_map(const SystemModel& model, const LeakageMapOptions& options, Exec exec = Exec::parallel);

/// Density matrix in the computational frame after the schedule.
CMat run_schedule(const SystemModel& model, const CMat& rho, const SampledControl& controls, bool decoherence);

}  // namespace tcsim
