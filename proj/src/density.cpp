#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include <Eigen/Eigenvalues>

#include "tcsim/errors.hpp"
#include "tcsim/evolution.hpp"

namespace tcsim {

namespace {

// Blocks (a, a - offset) of a density matrix for row sectors a <= top. Blocks
// with a different offset never mix under the dynamics.
struct Band {
  int offset = 0;
  int top = 0;
  std::vector<CMat> blocks;  // by row sector; empty when the column sector is out of range
};

using HalfStep = std::vector<CMat>;

class DensityKernel {
 public:
  DensityKernel(const SystemModel& model, const SampledControl& c, Frame frame, bool decoherence)
      : model_(model), dt_(c.dt), steps_(c.steps), decoherence_(decoherence) {
    if (c.has_drive())
      throw SimError(ErrorCode::unsupported_control, "density evolution supports flux controls only");
    if (c.steps > 0 && !(c.dt > 0.0)) throw SimError(ErrorCode::sampling, "dt must be positive");
    const int sectors = model.sector_count();
    Frequencies prev{-1.0, -1.0, -1.0};
    std::shared_ptr<const HalfStep> current;
    half_.reserve(c.steps);
    for (std::size_t k = 0; k < c.steps; ++k) {
      const Frequencies f = model.frequencies(c, k);
      if (!(f.q1 == prev.q1 && f.q2 == prev.q2 && f.coupler == prev.coupler)) {
        auto hs = std::make_shared<HalfStep>(static_cast<std::size_t>(sectors));
        for (int s = 0; s < sectors; ++s) {
          Eigen::SelfAdjointEigenSolver<RMat> es(model.sector_hamiltonian(s, f));
          const double shift = frame == Frame::rotating ? model.reference_frequency() * s : 0.0;
          CVec ph(es.eigenvalues().size());
          for (Eigen::Index i = 0; i < ph.size(); ++i)
            ph(i) = std::polar(1.0, -(es.eigenvalues()(i) - shift) * 0.5 * c.dt);
          const RMat& v = es.eigenvectors();
          (*hs)[static_cast<std::size_t>(s)] = v.cast<cplx>() * ph.asDiagonal() * v.transpose().cast<cplx>();
        }
        current = hs;
        prev = f;
      }
      half_.push_back(current);
    }

    const DeviceParams& p = model.params();
    for (Mode m : all_modes) {
      relax_[index_of(m)] = decoherence ? p.relaxation_rate(m) : 0.0;
      dephase_[index_of(m)] = decoherence ? p.dephasing_rate(m) : 0.0;
    }
    decay_.resize(static_cast<std::size_t>(sectors * sectors));
    for (int a = 0; a < sectors; ++a) {
      for (int b = 0; b < sectors; ++b) {
        const auto na = static_cast<Eigen::Index>(model.sector_size(a));
        const auto nb = static_cast<Eigen::Index>(model.sector_size(b));
        RMat g = RMat::Zero(na, nb);
        for (Mode m : all_modes) {
          const RVec& oa = model.sector_occupation(a, m);
          const RVec& ob = model.sector_occupation(b, m);
          const double gam = relax_[index_of(m)];
          const double kap = dephase_[index_of(m)];
          for (Eigen::Index i = 0; i < na; ++i)
            for (Eigen::Index j = 0; j < nb; ++j) {
              const double d = oa(i) - ob(j);
              g(i, j) -= 0.5 * gam * (oa(i) + ob(j)) + kap * d * d;
            }
        }
        decay_[static_cast<std::size_t>(a * sectors + b)] = g;
      }
    }
  }

  std::size_t steps() const { return steps_; }

  Band make_band(int offset, int top) const {
    Band b;
    b.offset = offset;
    b.top = top;
    b.blocks.resize(static_cast<std::size_t>(model_.sector_count()));
    for (int a = 0; a <= top; ++a) {
      const int c = a - offset;
      if (c < 0 || c >= model_.sector_count()) continue;
      b.blocks[static_cast<std::size_t>(a)] =
          CMat::Zero(static_cast<Eigen::Index>(model_.sector_size(a)), static_cast<Eigen::Index>(model_.sector_size(c)));
    }
    return b;
  }

  void step(Band& x, std::size_t k) const {
    const HalfStep& uh = *half_[k];
    if (!decoherence_) {
      conjugate(x, uh);
      conjugate(x, uh);
      return;
    }
    const double h = dt_;
    Band a = x;
    conjugate(a, uh);
    Band k1 = dissipate(x, h);
    conjugate(k1, uh);
    Band k2 = dissipate(axpy(a, 0.5, k1), h);
    Band k3 = dissipate(axpy(a, 0.5, k2), h);
    Band t = axpy(a, 1.0, k3);
    conjugate(t, uh);
    Band k4 = dissipate(t, h);
    Band acc = axpy(a, 1.0 / 6.0, k1);
    acc = axpy(acc, 1.0 / 3.0, k2);
    acc = axpy(acc, 1.0 / 3.0, k3);
    conjugate(acc, uh);
    x = axpy(acc, 1.0 / 6.0, k4);
  }

  void run(Band& x, const std::function<void(std::size_t, const Band&)>& observe = {}) const {
    const cplx tr0 = trace(x);
    if (observe) observe(0, x);
    for (std::size_t k = 0; k < steps_; ++k) {
      step(x, k);
      const cplx tr = trace(x);
      if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || std::abs(tr - tr0) > 1e-6)
        throw SimError(ErrorCode::integration,
                       "trace drift " + std::to_string(std::abs(tr - tr0)) + " at step " + std::to_string(k));
      if (observe) observe(k + 1, x);
    }
  }

 private:
  static Band axpy(const Band& x, double s, const Band& y) {
    Band out = x;
    for (std::size_t a = 0; a < out.blocks.size(); ++a)
      if (out.blocks[a].size() > 0) out.blocks[a] += s * y.blocks[a];
    return out;
  }

  void conjugate(Band& x, const HalfStep& uh) const {
    for (int a = 0; a <= x.top; ++a) {
      CMat& blk = x.blocks[static_cast<std::size_t>(a)];
      if (blk.size() == 0) continue;
      const int c = a - x.offset;
      blk = uh[static_cast<std::size_t>(a)] * blk * uh[static_cast<std::size_t>(c)].adjoint();
    }
  }

  Band dissipate(const Band& x, double h) const {
    const int sectors = model_.sector_count();
    Band out = x;
    for (int a = 0; a <= x.top; ++a) {
      CMat& blk = out.blocks[static_cast<std::size_t>(a)];
      if (blk.size() == 0) continue;
      const int c = a - x.offset;
      blk = blk.cwiseProduct(decay_[static_cast<std::size_t>(a * sectors + c)].cast<cplx>());
      if (a + 1 <= x.top && c + 1 < sectors) {
        const CMat& src = x.blocks[static_cast<std::size_t>(a + 1)];
        for (Mode m : all_modes) {
          const double gam = relax_[index_of(m)];
          if (gam == 0.0) continue;
          const RMat& la = model_.sector_lowering(a + 1, m);
          const RMat& lc = model_.sector_lowering(c + 1, m);
          blk.noalias() += gam * (la.cast<cplx>() * src * lc.transpose().cast<cplx>());
        }
      }
      blk *= h;
    }
    return out;
  }

  cplx trace(const Band& x) const {
    if (x.offset != 0) return 0.0;
    cplx t = 0.0;
    for (int a = 0; a <= x.top; ++a)
      if (x.blocks[static_cast<std::size_t>(a)].size() > 0) t += x.blocks[static_cast<std::size_t>(a)].trace();
    return t;
  }

  const SystemModel& model_;
  double dt_;
  std::size_t steps_;
  bool decoherence_;
  std::vector<std::shared_ptr<const HalfStep>> half_;
  std::array<double, 3> relax_{};
  std::array<double, 3> dephase_{};
  std::vector<RMat> decay_;
};

std::vector<Band> split(const CMat& rho, const SystemModel& model, const DensityKernel& kernel) {
  const auto& sectors = model.space().sectors();
  const int n = model.sector_count();
  std::vector<Band> bands;
  for (int off = -(n - 1); off <= n - 1; ++off) {
    Band b = kernel.make_band(off, n - 1);
    bool any = false;
    for (int a = 0; a < n; ++a) {
      const int c = a - off;
      if (c < 0 || c >= n) continue;
      CMat& blk = b.blocks[static_cast<std::size_t>(a)];
      const auto& ra = sectors[static_cast<std::size_t>(a)];
      const auto& rc = sectors[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < ra.size(); ++i)
        for (std::size_t j = 0; j < rc.size(); ++j)
          blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              rho(static_cast<Eigen::Index>(ra[i]), static_cast<Eigen::Index>(rc[j]));
      if (blk.cwiseAbs().maxCoeff() != 0.0) any = true;
    }
    if (any) bands.push_back(std::move(b));
  }
  return bands;
}

void scatter(const Band& b, const SystemModel& model, CMat& rho) {
  const auto& sectors = model.space().sectors();
  for (int a = 0; a <= b.top; ++a) {
    const CMat& blk = b.blocks[static_cast<std::size_t>(a)];
    if (blk.size() == 0) continue;
    const auto& ra = sectors[static_cast<std::size_t>(a)];
    const auto& rc = sectors[static_cast<std::size_t>(a - b.offset)];
    for (std::size_t i = 0; i < ra.size(); ++i)
      for (std::size_t j = 0; j < rc.size(); ++j)
        rho(static_cast<Eigen::Index>(ra[i]), static_cast<Eigen::Index>(rc[j])) =
            blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
}

// Phase applied to row i when moving into the computational frame after time T.
RVec frame_phases(const SystemModel& model, const ChannelOptions& opt, double duration) {
  const HilbertSpace& space = model.space();
  RVec ph(static_cast<Eigen::Index>(space.dimension()));
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto l = space.label(i);
    const int n = l[0] + l[1] + l[2];
    const double shift = opt.frame == Frame::rotating ? model.reference_frequency() * n : 0.0;
    ph(static_cast<Eigen::Index>(i)) = (model.frame_energies()(static_cast<Eigen::Index>(i)) - shift) * duration -
                                       (l[0] * opt.virtual_z.phi_1 + l[2] * opt.virtual_z.phi_2);
  }
  return ph;
}

}  // namespace

QuantumState evolve_density(const QuantumState& rho0, const SampledControl& controls, const SystemModel& model,
                            bool include_decoherence, Frame frame) {
  auto out = evolve_density_trajectory(rho0, controls, model, include_decoherence, frame, {controls.steps});
  return QuantumState::from_density(std::move(out.front()));
}

std::vector<CMat> evolve_density_trajectory(const QuantumState& rho0, const SampledControl& controls,
                                           const SystemModel& model, bool include_decoherence, Frame frame,
                                           const std::vector<std::size_t>& record_steps) {
  if (rho0.kind() != QuantumState::Kind::density)
    throw SimError(ErrorCode::unsupported, "evolve_density expects a density matrix");
  if (rho0.dimension() != model.space().dimension())
    throw SimError(ErrorCode::invalid_dimension, "state dimension does not match the model");
  for (std::size_t i = 0; i < record_steps.size(); ++i) {
    if (record_steps[i] > controls.steps || (i > 0 && record_steps[i] < record_steps[i - 1]))
      throw SimError(ErrorCode::sampling, "record steps must be ascending and within the schedule");
  }
  const DensityKernel kernel(model, controls, frame, include_decoherence);
  const auto n = static_cast<Eigen::Index>(model.space().dimension());
  std::vector<CMat> out(record_steps.size(), CMat::Zero(n, n));
  std::vector<Band> bands = split(rho0.density(), model, kernel);
  for (Band& b : bands) {
    std::size_t next = 0;
    kernel.run(b, [&](std::size_t k, const Band& x) {
      while (next < record_steps.size() && record_steps[next] == k) scatter(x, model, out[next++]);
    });
  }
  return out;
}

CMat Superoperator::apply(const CMat& rho) const {
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::Map<const CVec> v(rho.data(), n * n);
  CVec w = matrix * v;
  return Eigen::Map<CMat>(w.data(), n, n);
}

Superoperator gate_superoperator(const SystemModel& model, const SampledControl& controls,
                                 const ChannelOptions& options, Exec exec) {
  const HilbertSpace& space = model.space();
  const std::size_t d = space.dimension();
  const DensityKernel kernel(model, controls, options.frame, options.include_decoherence);
  const RVec phase = frame_phases(model, options, controls.duration());
  const auto& sectors = space.sectors();

  const int limit = options.max_dissipative_sector;
  CMat g;
  if (limit >= 0) {
    g = to_computational_frame(block_propagator(controls, model, options.frame).dense(space), model, options.frame,
                               controls.duration());
    g = apply_virtual_z(g, space, VirtualZ{options.virtual_z.phi_1, options.virtual_z.phi_2, 0.0});
  }

  std::vector<std::vector<Eigen::Triplet<cplx>>> columns(d * d);
  for_each_index(d * d, exec, [&](std::size_t col) {
    const std::size_t j = col % d;
    const std::size_t k = col / d;
    const auto [sj, pj] = space.sector_position(j);
    const auto [sk, pk] = space.sector_position(k);
    if (limit >= 0 && std::max(sj, sk) > limit) {
      auto& trip = columns[col];
      for (std::size_t q : sectors[static_cast<std::size_t>(sk)])
        for (std::size_t p : sectors[static_cast<std::size_t>(sj)]) {
          const cplx v = g(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) *
                         std::conj(g(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)));
          if (v != cplx(0.0, 0.0)) trip.emplace_back(static_cast<int>(p + q * d), static_cast<int>(col), v);
        }
      return;
    }
    Band b = kernel.make_band(sj - sk, sj);
    const RMat& vj = model.dressed_block(sj);
    const RMat& vk = model.dressed_block(sk);
    b.blocks[static_cast<std::size_t>(sj)] =
        (vj.col(static_cast<Eigen::Index>(pj)) * vk.col(static_cast<Eigen::Index>(pk)).transpose()).cast<cplx>();
    kernel.run(b);
    auto& trip = columns[col];
    for (int a = 0; a <= b.top; ++a) {
      const CMat& blk = b.blocks[static_cast<std::size_t>(a)];
      if (blk.size() == 0) continue;
      const int c = a - b.offset;
      const CMat y = model.dressed_block(a).transpose().cast<cplx>() * blk * model.dressed_block(c).cast<cplx>();
      const auto& ra = sectors[static_cast<std::size_t>(a)];
      const auto& rc = sectors[static_cast<std::size_t>(c)];
      for (std::size_t q = 0; q < rc.size(); ++q) {
        for (std::size_t p = 0; p < ra.size(); ++p) {
          const cplx v = y(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
          if (v == cplx(0.0, 0.0)) continue;
          const double ph = phase(static_cast<Eigen::Index>(ra[p])) - phase(static_cast<Eigen::Index>(rc[q]));
          trip.emplace_back(static_cast<int>(ra[p] + rc[q] * d), static_cast<int>(col), v * std::polar(1.0, ph));
        }
      }
    }
  });

  Superoperator s;
  s.dim = d;
  s.matrix.resize(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  std::vector<Eigen::Triplet<cplx>> all;
  all.reserve(nnz);
  for (auto& c : columns) all.insert(all.end(), c.begin(), c.end());
  s.matrix.setFromTriplets(all.begin(), all.end());
  s.matrix.makeCompressed();
  return s;
}

CMat evolve_in_computational_frame(const CMat& rho, const SystemModel& model, const SampledControl& controls,
                                   const ChannelOptions& options) {
  const RMat& v = model.dressed().vectors;
  const CMat bare = v.cast<cplx>() * rho * v.transpose().cast<cplx>();
  CMat out = evolve_density(QuantumState::from_density(bare), controls, model, options.include_decoherence,
                            options.frame)
                 .density();
  out = v.transpose().cast<cplx>() * out * v.cast<cplx>();
  const RVec ph = frame_phases(model, options, controls.duration());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) *= std::polar(1.0, ph(i) - ph(j));
  return out;
}

}  // namespace tcsim
