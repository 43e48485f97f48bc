#include <benchmark/benchmark.h>

#include "tcsim/benchmarking.hpp"
#include "tcsim/experiments.hpp"
#include "tcsim/units.hpp"

using namespace tcsim;

namespace {

const SystemModel& model() {
  static const SystemModel m(Device::nominal());
  return m;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_Chevron(benchmark::State& state) {
  ChevronOptions o;
  o.v_b = linspace(0.0, 0.35, 32);
  o.tau = linspace(0.0, 500e-9, 501);
  o.resonance_frequency = ghz(4.110);
  for (auto _ : state) benchmark::DoNotOptimize(iswap_chevron(model(), o, exec_of(state)));
  label(state);
}

void BM_GateSuperoperator(benchmark::State& state) {
  const SampledControl c = sample_schedule(adiabatic_cz_schedule(0.2357, 89.4e-9), 0.1e-9);
  ChannelOptions opt;
  opt.max_dissipative_sector = 2;
  for (auto _ : state) benchmark::DoNotOptimize(gate_superoperator(model(), c, opt, exec_of(state)));
  label(state);
}

void BM_RbDepolarizing(benchmark::State& state) {
  RbConfig cfg;
  cfg.lengths = {1, 10, 50, 100};
  cfg.samples = 50;
  cfg.seed = 1;
  const DepolarizingBackend b(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(run_rb_pb(cfg, b, exec_of(state)));
  label(state);
}

void BM_RbLindblad(benchmark::State& state) {
  static const LindbladBackend b(model(), adiabatic_cz_schedule(0.2357, 89.4e-9));
  RbConfig cfg;
  cfg.lengths = {1, 10, 40};
  cfg.samples = 8;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_rb(cfg, b, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_Chevron)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GateSuperoperator)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RbDepolarizing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RbLindblad)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
