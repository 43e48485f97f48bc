#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tcsim/errors.hpp"
#include "tcsim/experiments.hpp"

namespace tcsim {

struct NMConfig {
  std::vector<double> scale;  // initial simplex step per dimension; empty means 5% of |x0| (or 0.00025)
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_evaluations = 100;
  double tolerance = 1e-12;  // spread of simplex values

  void validate(std::size_t dim) const;
};

struct NMEvaluation {
  std::vector<double> x;
  double value = 0.0;
};

struct NMResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<NMEvaluation> trace;
  bool converged = false;
};

class OptimizerError : public SimError {
 public:
  OptimizerError(const std::string& msg, std::vector<NMEvaluation> trace)
      : SimError(ErrorCode::optimizer, msg), trace_(std::move(trace)) {}
  const std::vector<NMEvaluation>& trace() const { return trace_; }

 private:
  std::vector<NMEvaluation> trace_;
};

using Objective = std::function<double(const std::vector<double>&)>;

NMResult nelder_mead(const Objective& f, const std::vector<double>& x0, const NMConfig& config = {});

struct CzCalibration {
  CzFamily family = CzFamily::adiabatic;
  double v_b = 0.0;
  double v_q = 0.0;
  double duration = 0.0;
  double rise = 0.0;
  GateResult gate;
  VirtualZ virtual_z;
  double infidelity = 0.0;
  double objective = 0.0;
  NMResult optimization;
  double scan_duration = 0.0;  // duration at which the starting point was found
  double start_v_b = 0.0;
  double start_v_q = 0.0;

  Schedule schedule() const { return cz_schedule(family, v_b, v_q, duration, rise); }
};

/// Gate metrics for one parameter set, duration snapped to dt.
CzCalibration evaluate_cz(const SystemModel& model, CzFamily family, double v_b, double v_q, double duration,
                          double rise, double dt);

struct AdiabaticTuneOptions {
  double duration = 30e-9;
  bool optimize_duration = true;
  /// When the scan has no pi crossing, retry at longer durations instead of failing.
  bool grow_duration = true;
  double duration_step = 10e-9;
  double max_duration = 200e-9;
  std::vector<double> scan_v_b = linspace(0.0, 0.3, 61);
  double dt = 0.1e-9;
  NMConfig nm;
};

struct DiabaticTuneOptions {
  double duration = 18e-9;
  double rise = 2e-9;
  std::vector<double> v_b = linspace(0.0, 0.3, 16);
  std::vector<double> v_q = linspace(0.0, 0.2, 16);
  double leakage_weight = 1.0;
  double leakage_threshold = 0.05;
  double dt = 0.1e-9;
  NMConfig nm;
};

CzCalibration tune_adiabatic_cz(const SystemModel& model, const AdiabaticTuneOptions& options = {},
                                Exec exec = Exec::parallel);
CzCalibration tune_diabatic_cz(const SystemModel& model, const DiabaticTuneOptions& options = {},
                               Exec exec = Exec::parallel);

}  // namespace tcsim
