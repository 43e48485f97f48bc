#include "tcsim/benchmarking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcsim/errors.hpp"
#include "tcsim/rng.hpp"

namespace tcsim {

namespace {

Mat4 element_unitary(std::size_t i) { return CliffordGroup::instance()[i].unitary; }

double reduced_purity_4(const Mat4& rho) { return (rho * rho).trace().real(); }

double sample_fraction(double p, std::uint64_t shots, std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < shots; ++s) hits += rng.bernoulli(p) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(shots);
}

Mat4 ground4() {
  Mat4 rho = Mat4::Zero();
  rho(0, 0) = 1.0;
  return rho;
}

}  // namespace

SequenceResult IdealBackend::run(const RbSequence& seq, bool want_purity) const {
  if (want_purity && !density_) throw SimError(ErrorCode::unsupported, "vector backend has no purity");
  Vec4 psi = Vec4::Zero();
  psi(0) = 1.0;
  for (const auto& s : seq.steps) psi = element_unitary(s.element) * psi;
  SequenceResult r;
  r.purity = want_purity ? reduced_purity_4(psi * psi.adjoint()) : 1.0;
  psi = element_unitary(seq.recovery) * psi;
  r.fidelity = std::norm(psi(0));
  return r;
}

DepolarizingBackend::DepolarizingBackend(double d, double d_interleaved) : d_(d), d_interleaved_(d_interleaved) {
  for (double v : {d, d_interleaved})
    if (!(v >= 0.0 && v <= 1.0)) throw SimError(ErrorCode::config, "depolarizing strength must lie in [0, 1]");
}

SequenceResult DepolarizingBackend::run(const RbSequence& seq, bool want_purity) const {
  const Mat4 mixed = Mat4::Identity() / 4.0;
  auto step = [&](Mat4& rho, std::size_t e, double d) {
    const Mat4 u = element_unitary(e);
    rho = (1.0 - d) * (u * rho * u.adjoint()) + d * mixed;
  };
  Mat4 rho = ground4();
  for (const auto& s : seq.steps) step(rho, s.element, s.interleaved ? d_interleaved_ : d_);
  SequenceResult r;
  r.purity = want_purity ? reduced_purity_4(rho) : 1.0;
  step(rho, seq.recovery, d_);
  r.fidelity = rho(0, 0).real();
  return r;
}

SequenceResult OverRotationBackend::run(const RbSequence& seq, bool want_purity) const {
  const Mat2 rx = (Mat2() << std::cos(theta_ / 2), cplx(0, -std::sin(theta_ / 2)), cplx(0, -std::sin(theta_ / 2)),
                   std::cos(theta_ / 2))
                      .finished();
  const Mat4 err = kron(rx, rx);
  Mat4 rho = ground4();
  for (const auto& s : seq.steps) {
    const Mat4 u = err * element_unitary(s.element);
    rho = u * rho * u.adjoint();
  }
  SequenceResult r;
  r.purity = want_purity ? reduced_purity_4(rho) : 1.0;
  const Mat4 u = err * element_unitary(seq.recovery);
  rho = u * rho * u.adjoint();
  r.fidelity = rho(0, 0).real();
  return r;
}

// ---- Lindblad backend ----

LindbladBackend::LindbladBackend(const SystemModel& model, const Schedule& cz, const LindbladOptions& options,
                                 Exec exec)
    : model_(model), options_(options) {
  const SampledControl gate = sample_schedule(cz, options.dt);
  cz_result_ = simulate_gate(model, gate);
  ChannelOptions co;
  co.include_decoherence = options.decoherence;
  co.virtual_z = compensation_for(cz_result_);
  co.max_dissipative_sector = 2;
  cz_ = gate_superoperator(model, gate, co, exec);
  ChannelOptions io;
  io.include_decoherence = options.decoherence;
  io.max_dissipative_sector = 2;
  idle_ = gate_superoperator(model, SampledControl::idle(options.single_qubit_time, options.dt), io, exec);

  const HilbertSpace& space = model.space();
  locals_.reserve(49);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b)
      locals_.push_back(local_unitary(space, pulse_unitary(static_cast<Pulse1>(a)), pulse_unitary(static_cast<Pulse1>(b))));
  Mat2 x, y, z;
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  const std::array<Mat2, 3> paulis{x, y, z};
  const Mat2 id = Mat2::Identity();
  for (std::size_t k = 0; k < 3; ++k) {
    paulis_q1_[k] = local_unitary(space, paulis[k], id);
    paulis_q2_[k] = local_unitary(space, id, paulis[k]);
  }
}

CMat LindbladBackend::apply_layer(const CMat& rho, const Layer& layer) const {
  if (layer.cz) return cz_.apply(rho);
  const CMat& u = locals_[static_cast<std::size_t>(static_cast<int>(layer.q1) * 7 + static_cast<int>(layer.q2))];
  CMat out = u * rho * u.adjoint();
  const double p = options_.single_qubit_depolarizing;
  if (p > 0.0) {
    auto depolarize = [&](const std::array<CMat, 3>& paulis) {
      CMat acc = (1.0 - p) * out;
      for (const auto& s : paulis) acc += (p / 3.0) * (s * out * s.adjoint());
      out = std::move(acc);
    };
    if (layer.q1 != Pulse1::id) depolarize(paulis_q1_);
    if (layer.q2 != Pulse1::id) depolarize(paulis_q2_);
  }
  return idle_.apply(out);
}

SequenceResult LindbladBackend::run(const RbSequence& seq, bool want_purity) const {
  const CliffordGroup& g = CliffordGroup::instance();
  const HilbertSpace& space = model_.space();
  const auto n = static_cast<Eigen::Index>(space.dimension());
  const auto i000 = static_cast<Eigen::Index>(space.index(0, 0, 0));
  CMat rho = CMat::Zero(n, n);
  rho(i000, i000) = 1.0;
  for (const auto& s : seq.steps)
    for (const auto& l : g[s.element].layers) rho = apply_layer(rho, l);
  SequenceResult r;
  if (want_purity) {
    // Coupler traced out, qubits restricted to levels 0/1.
    Mat4 red = Mat4::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto li = space.label(static_cast<std::size_t>(i));
      if (li[0] > 1 || li[2] > 1) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto lj = space.label(static_cast<std::size_t>(j));
        if (lj[0] > 1 || lj[2] > 1 || lj[1] != li[1]) continue;
        red(2 * li[0] + li[2], 2 * lj[0] + lj[2]) += rho(i, j);
      }
    }
    r.purity = reduced_purity_4(red);
  }
  for (const auto& l : g[seq.recovery].layers) rho = apply_layer(rho, l);
  r.fidelity = rho(i000, i000).real();
  return r;
}

// ---- RB / PB drivers ----

void validate(const RbConfig& c) {
  if (c.lengths.empty()) throw SimError(ErrorCode::config, "rb needs at least one sequence length");
  if (c.samples == 0) throw SimError(ErrorCode::config, "rb samples must be at least 1");
  for (int m : c.lengths)
    if (m < 1) throw SimError(ErrorCode::config, "sequence lengths must be at least 1");
  if (c.shots && *c.shots == 0) throw SimError(ErrorCode::config, "shots must be at least 1");
}

namespace {

RbTable summarize(const RbConfig& c, const std::vector<double>& values) {
  RbTable table(c.lengths.size());
  for (std::size_t im = 0; im < table.size(); ++im) {
    RbPoint& p = table[im];
    p.m = c.lengths[im];
    p.values.assign(values.begin() + static_cast<std::ptrdiff_t>(im * c.samples),
                    values.begin() + static_cast<std::ptrdiff_t>((im + 1) * c.samples));
    p.mean = std::accumulate(p.values.begin(), p.values.end(), 0.0) / static_cast<double>(c.samples);
    double ss = 0.0;
    for (double v : p.values) ss += (v - p.mean) * (v - p.mean);
    p.std = c.samples > 1 ? std::sqrt(ss / static_cast<double>(c.samples - 1)) : 0.0;
  }
  return table;
}

RbPbTables run_sequences(const RbConfig& c, const RbBackend& backend, Exec exec, bool purity) {
  validate(c);
  if (purity && !backend.supports_density())
    throw SimError(ErrorCode::unsupported, backend.name() + " does not support density matrices");
  const std::size_t total = c.lengths.size() * c.samples;
  std::vector<double> fid(total), pur(total, 1.0);
  for_each_index(total, exec, [&](std::size_t k) {
    const std::size_t s = k % c.samples;
    const int m = c.lengths[k / c.samples];
    const std::uint64_t seed = derive_seed(c.seed, {static_cast<std::uint64_t>(m), s});
    const RbSequence seq = rb_sequence(m, c.interleave, seed);
    SequenceResult r;
    try {
      r = backend.run(seq, purity);
    } catch (const SimError& e) {
      throw SimError(e.code(), backend.name() + " failed at m=" + std::to_string(m) + " sample=" + std::to_string(s) +
                                   ": " + e.what());
    }
    fid[k] = c.shots ? sample_fraction(std::clamp(r.fidelity, 0.0, 1.0), *c.shots, derive_seed(seed, {1})) : r.fidelity;
    pur[k] = r.purity;
  });
  return {summarize(c, fid), purity ? summarize(c, pur) : RbTable{}};
}

}  // namespace

RbTable run_rb(const RbConfig& c, const RbBackend& backend, Exec exec) {
  return run_sequences(c, backend, exec, false).fidelity;
}

RbTable run_pb(const RbConfig& c, const RbBackend& backend, Exec exec) {
  return run_sequences(c, backend, exec, true).purity;
}

RbPbTables run_rb_pb(const RbConfig& c, const RbBackend& backend, Exec exec) {
  return run_sequences(c, backend, exec, true);
}

// ---- error rates ----

double rb_error(double p) { return 0.75 * (1.0 - p); }

double interleaved_error(double p_ref, double p_int) {
  if (p_ref == 0.0) throw SimError(ErrorCode::division, "reference decay is zero");
  return 0.75 * (1.0 - p_int / p_ref);
}

double incoherent_error(double u) { return 0.75 * (1.0 - std::sqrt(u)); }

ErrorReport error_rates(const DecayFit& ref, const std::optional<DecayFit>& interleaved,
                        const std::optional<DecayFit>& purity_ref, const std::optional<DecayFit>& purity_int) {
  ErrorReport r;
  r.r_ref = {rb_error(ref.decay), 0.75 * ref.decay_sigma()};
  if (interleaved) {
    const double pr = ref.decay;
    const double pi = interleaved->decay;
    r.r_int = Estimate{rb_error(pi), 0.75 * interleaved->decay_sigma()};
    const double cz = interleaved_error(pr, pi);
    const double s = 0.75 * std::hypot(interleaved->decay_sigma() / pr, pi * ref.decay_sigma() / (pr * pr));
    r.r_cz = Estimate{cz, s};
    r.f_cz = Estimate{1.0 - cz, s};
  }
  auto incoherent = [](const DecayFit& f) {
    const double u = f.decay;
    return Estimate{incoherent_error(u), u > 0.0 ? 0.75 * f.decay_sigma() / (2.0 * std::sqrt(u)) : 0.0};
  };
  if (purity_ref) {
    r.r_incoherent_ref = incoherent(*purity_ref);
    if (r.r_ref.value != 0.0) r.incoherent_fraction = r.r_incoherent_ref->value / r.r_ref.value;
  }
  if (purity_int) r.r_incoherent_int = incoherent(*purity_int);
  return r;
}

}  // namespace tcsim
