#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "tcsim/benchmarking.hpp"
#include "tcsim/errors.hpp"
#include "tcsim/tuneup.hpp"
#include "tcsim/units.hpp"

using namespace tcsim;

namespace {

const SystemModel& nominal_model() {
  static const SystemModel m(Device::nominal());
  return m;
}

double rosenbrock(const std::vector<double>& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

const CzCalibration& adiabatic() {
  static const CzCalibration c = tune_adiabatic_cz(nominal_model());
  return c;
}

}  // namespace

TEST(NelderMead, Quadratic) {
  const auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 1.5, 2) + 3.0 * std::pow(x[1] + 0.5, 2); };
  NMConfig cfg;
  cfg.scale = {0.5, 0.5};
  cfg.max_evaluations = 300;
  const NMResult r = nelder_mead(f, {0.0, 0.0}, cfg);
  EXPECT_NEAR(r.x[0], 1.5, 1e-4);
  EXPECT_NEAR(r.x[1], -0.5, 1e-4);
  EXPECT_TRUE(r.converged);
}

TEST(NelderMead, Rosenbrock) {
  NMConfig cfg;
  cfg.scale = {0.5, 0.5};
  cfg.max_evaluations = 200;
  const NMResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
  EXPECT_LE(r.trace.size(), 200u);
  EXPECT_LT(r.value, 1e-4);
}

TEST(NelderMead, BudgetAndBestOfTrace) {
  NMConfig cfg;
  cfg.max_evaluations = 3;
  const NMResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
  EXPECT_EQ(r.trace.size(), 3u);
  EXPECT_FALSE(r.converged);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.trace) best = std::min(best, e.value);
  EXPECT_EQ(r.value, best);
  EXPECT_EQ(rosenbrock(r.x), r.value);
}

TEST(NelderMead, TraceBestNeverWorsens) {
  NMConfig cfg;
  cfg.max_evaluations = 100;
  const NMResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
  for (const auto& e : r.trace) EXPECT_GE(e.value, r.value);
  const NMResult again = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
  ASSERT_EQ(again.trace.size(), r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) EXPECT_EQ(again.trace[i].x, r.trace[i].x);
}

TEST(NelderMead, NonFiniteObjectiveAborts) {
  int calls = 0;
  const auto f = [&](const std::vector<double>& x) {
    ++calls;
    return calls == 4 ? std::nan("") : x[0] * x[0];
  };
  try {
    nelder_mead(f, {1.0});
    FAIL();
  } catch (const OptimizerError& e) {
    EXPECT_EQ(e.code(), ErrorCode::optimizer);
    ASSERT_EQ(e.trace().size(), 4u);
    EXPECT_TRUE(std::isnan(e.trace().back().value));
  }
}

TEST(NelderMead, ConfigValidation) {
  const auto f = [](const std::vector<double>& x) { return x[0]; };
  NMConfig cfg;
  cfg.max_evaluations = 1;
  EXPECT_THROW(nelder_mead(f, {1.0}, cfg), SimError);
  cfg = {};
  cfg.scale = {1.0, 2.0};
  EXPECT_THROW(nelder_mead(f, {1.0}, cfg), SimError);
  EXPECT_THROW(nelder_mead(f, {}, {}), SimError);
}

TEST(TuneAdiabatic, ReachesCZ) {
  const CzCalibration& c = adiabatic();
  EXPECT_NEAR(std::abs(wrap_phase(c.gate.phi_c - pi)), 0.0, 0.01);
  EXPECT_LT(c.gate.leakage, 1e-3);
  EXPECT_LT(c.infidelity, 1e-3);
  EXPECT_LE(c.optimization.trace.size(), 100u);
  EXPECT_GE(c.duration, 30e-9);
}

TEST(TuneAdiabatic, Deterministic) {
  AdiabaticTuneOptions o;
  o.nm.max_evaluations = 12;
  o.duration = 60e-9;
  const CzCalibration a = tune_adiabatic_cz(nominal_model(), o, Exec::serial);
  const CzCalibration b = tune_adiabatic_cz(nominal_model(), o, Exec::parallel);
  EXPECT_EQ(a.v_b, b.v_b);
  EXPECT_EQ(a.duration, b.duration);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(TuneAdiabatic, NoCrossingWithoutGrowth) {
  AdiabaticTuneOptions o;
  o.duration = 10e-9;
  o.grow_duration = false;
  o.scan_v_b = linspace(0.0, 0.1, 5);
  try {
    tune_adiabatic_cz(nominal_model(), o);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::calibration);
  }
}

const CzCalibration& diabatic() {
  static const CzCalibration c = tune_diabatic_cz(nominal_model());
  return c;
}

TEST(TuneDiabatic, ShorterThanAdiabaticWithLowLeakage) {
  const CzCalibration& c = diabatic();
  EXPECT_LT(c.gate.leakage, 1e-2);
  EXPECT_LT(c.duration, adiabatic().duration);
  EXPECT_LE(c.optimization.trace.size(), 100u);
  EXPECT_EQ(c.objective, c.infidelity + c.gate.leakage);
}

TEST(TuneDiabatic, PiContourMeetsLowLeakage) {
  const CzCalibration& cal = diabatic();
  const auto gate = [&](const std::vector<double>& x) {
    return evaluate_cz(nominal_model(), CzFamily::diabatic, x[0], x[1], cal.duration, cal.rise, 0.1e-9).gate;
  };
  const auto penalized = [&](const std::vector<double>& x) {
    const GateResult g = gate(x);
    const double e = wrap_phase(g.phi_c - pi);
    return g.leakage + 100.0 * e * e;
  };
  NMConfig cfg;
  cfg.scale = {0.005, 0.005};
  cfg.max_evaluations = 300;
  const NMResult r = nelder_mead(penalized, {cal.v_b, cal.v_q}, cfg);
  const GateResult g = gate(r.x);
  EXPECT_LT(std::abs(wrap_phase(g.phi_c - pi)), 0.02);
  EXPECT_LT(g.leakage, 1e-2);
}

TEST(EvaluateCz, SnapsDurationAndCompensates) {
  const CzCalibration c = evaluate_cz(nominal_model(), CzFamily::adiabatic, 0.2, 0.0, 30.04e-9, 0.0, 0.1e-9);
  EXPECT_NEAR(c.duration, 30e-9, 1e-15);
  const Mat4 comp = virtual_z_compensation(c.gate);
  EXPECT_NEAR(std::arg(comp(1, 1) / comp(0, 0)), 0.0, 1e-9);
  EXPECT_NEAR(std::arg(comp(2, 2) / comp(0, 0)), 0.0, 1e-9);
}

TEST(LindbladBackend, TunedGateIsNearlyIdealWithoutDecoherence) {
  LindbladOptions o;
  o.decoherence = false;
  const LindbladBackend b(nominal_model(), adiabatic().schedule(), o);
  EXPECT_NEAR(std::abs(wrap_phase(b.cz_result().phi_c - pi)), 0.0, 0.01);
  const SequenceResult r = b.run(rb_sequence(4, cz_unitary(), 5), true);
  EXPECT_GT(r.fidelity, 0.99);
  EXPECT_GT(r.purity, 0.99);
}

TEST(LindbladBackend, DecoherenceReducesPurity) {
  const LindbladBackend b(nominal_model(), adiabatic().schedule());
  const SequenceResult r = b.run(rb_sequence(10, std::nullopt, 5), true);
  EXPECT_LT(r.purity, 0.999);
  EXPECT_GT(r.fidelity, 0.5);
}
