#include "tcsim/evolution.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tcsim/errors.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

namespace {

CMat step_unitary(const RMat& h, double shift, double dt) {
  Eigen::SelfAdjointEigenSolver<RMat> es(h);
  const RMat& v = es.eigenvectors();
  CVec ph(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i)
    ph(i) = std::polar(1.0, -(es.eigenvalues()(i) - shift) * dt);
  return v.cast<cplx>() * ph.asDiagonal() * v.transpose().cast<cplx>();
}

bool same(const Frequencies& a, const Frequencies& b) {
  return a.q1 == b.q1 && a.q2 == b.q2 && a.coupler == b.coupler;
}

double frame_shift(const SystemModel& model, Frame frame, int sector) {
  return frame == Frame::rotating ? model.reference_frequency() * sector : 0.0;
}

double vz_phase(const std::array<int, 3>& label, const VirtualZ& vz) {
  return label[0] * vz.phi_1 + label[2] * vz.phi_2 + vz.global;
}

CMat dense_drive_propagator(const SampledControl& c, const SystemModel& model, Frame frame) {
  const HilbertSpace& space = model.space();
  const auto n = static_cast<Eigen::Index>(space.dimension());
  const RMat a1 = space.embed(annihilation_operator(space.dim(Mode::q1)), Mode::q1);
  const RMat a2 = space.embed(annihilation_operator(space.dim(Mode::q2)), Mode::q2);
  RVec number = RVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) number(i) = space.excitations(static_cast<std::size_t>(i));
  const double wref = model.reference_frequency();

  auto frame_phase = [&](Channel ch, double t) {
    double p = 0.0;
    for (const auto& u : c.frame_updates)
      if (u.channel == ch && u.time <= t + 1e-15) p += u.phase;
    return p;
  };

  CMat u = CMat::Identity(n, n);
  for (std::size_t k = 0; k < c.steps; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * c.dt;
    CMat h = model.hamiltonian(model.frequencies(c, k)).cast<cplx>();
    if (frame == Frame::rotating) h.diagonal() -= (wref * number).cast<cplx>();
    for (int q = 0; q < 2; ++q) {
      const DriveSample& d = c.drive[static_cast<std::size_t>(q)][k];
      if (d.rabi == 0.0) continue;
      const RMat& a = q == 0 ? a1 : a2;
      const double phase = d.phase + frame_phase(q == 0 ? Channel::xy_q1 : Channel::xy_q2, t);
      if (frame == Frame::lab) {
        h += (d.rabi * std::cos(d.frequency * t + phase)) * (a + a.transpose()).cast<cplx>();
      } else {
        const cplx e = std::polar(1.0, -((d.frequency - wref) * t + phase));
        h += (0.5 * d.rabi) * (e * a.transpose().cast<cplx>() + std::conj(e) * a.cast<cplx>());
      }
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CVec ph(n);
    for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::polar(1.0, -es.eigenvalues()(i) * c.dt);
    u = (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()) * u;
  }
  return u;
}

}  // namespace

CMat BlockUnitary::dense(const HilbertSpace& space) const {
  const auto n = static_cast<Eigen::Index>(space.dimension());
  CMat u = CMat::Zero(n, n);
  const auto& sectors = space.sectors();
  for (std::size_t s = 0; s < blocks.size() && s < sectors.size(); ++s) {
    const auto& idx = sectors[s];
    if (blocks[s].size() == 0) continue;
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        u(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c])) =
            blocks[s](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return u;
}

BlockUnitary block_propagator(const SampledControl& controls, const SystemModel& model, Frame frame,
                              int max_sector) {
  if (controls.steps > 0 && !(controls.dt > 0.0)) throw SimError(ErrorCode::sampling, "dt must be positive");
  if (controls.has_drive())
    throw SimError(ErrorCode::unsupported_control, "drive breaks excitation-number blocking");
  const int last = max_sector < 0 ? model.sector_count() - 1 : std::min(max_sector, model.sector_count() - 1);
  BlockUnitary out;
  out.blocks.resize(static_cast<std::size_t>(model.sector_count()));
  for (int s = 0; s <= last; ++s) {
    const auto n = static_cast<Eigen::Index>(model.sector_size(s));
    out.blocks[static_cast<std::size_t>(s)] = CMat::Identity(n, n);
  }
  std::vector<CMat> step(static_cast<std::size_t>(last + 1));
  Frequencies prev{-1.0, -1.0, -1.0};
  for (std::size_t k = 0; k < controls.steps; ++k) {
    const Frequencies f = model.frequencies(controls, k);
    if (!same(f, prev)) {
      for (int s = 0; s <= last; ++s)
        step[static_cast<std::size_t>(s)] =
            step_unitary(model.sector_hamiltonian(s, f), frame_shift(model, frame, s), controls.dt);
      prev = f;
    }
    for (int s = 0; s <= last; ++s)
      out.blocks[static_cast<std::size_t>(s)] = step[static_cast<std::size_t>(s)] * out.blocks[static_cast<std::size_t>(s)];
  }
  return out;
}

CMat propagator(const SampledControl& controls, const SystemModel& model, Frame frame) {
  if (controls.has_drive()) return dense_drive_propagator(controls, model, frame);
  return block_propagator(controls, model, frame).dense(model.space());
}

CMat to_computational_frame(const CMat& u, const SystemModel& model, Frame frame, double duration) {
  const HilbertSpace& space = model.space();
  const RMat& v = model.dressed().vectors;
  CMat g = v.transpose().cast<cplx>() * u * v.cast<cplx>();
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const double e = model.frame_energies()(static_cast<Eigen::Index>(i)) -
                     frame_shift(model, frame, space.excitations(i));
    g.row(static_cast<Eigen::Index>(i)) *= std::polar(1.0, e * duration);
  }
  return g;
}

GateResult computational_projection(const CMat& u, const HilbertSpace& space) {
  const std::array<std::size_t, 4> comp{space.index(0, 0, 0), space.index(0, 0, 1), space.index(1, 0, 0),
                                        space.index(1, 0, 1)};
  GateResult r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r.block(i, j) = u(static_cast<Eigen::Index>(comp[static_cast<std::size_t>(i)]),
                        static_cast<Eigen::Index>(comp[static_cast<std::size_t>(j)]));
  double min_block = 1.0;
  double min_qubit = 1.0;
  for (int j = 0; j < 4; ++j) {
    min_block = std::min(min_block, r.block.col(j).squaredNorm());
    double q = 0.0;
    const auto col = static_cast<Eigen::Index>(comp[static_cast<std::size_t>(j)]);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
      const auto l = space.label(i);
      if (l[0] <= 1 && l[2] <= 1) q += std::norm(u(static_cast<Eigen::Index>(i), col));
    }
    min_qubit = std::min(min_qubit, q);
  }
  r.leakage = std::clamp(1.0 - min_block, 0.0, 1.0);
  r.qubit_leakage = std::clamp(1.0 - min_qubit, 0.0, 1.0);
  const double t000 = std::arg(r.block(0, 0));
  const double t001 = std::arg(r.block(1, 1));
  const double t100 = std::arg(r.block(2, 2));
  const double t101 = std::arg(r.block(3, 3));
  r.global_phase = t000;
  r.phi_1 = wrap_phase(t100 - t000);
  r.phi_2 = wrap_phase(t001 - t000);
  r.phi_c = wrap_phase(t101 - t100 - t001 + t000);
  return r;
}

GateResult simulate_gate(const SystemModel& model, const SampledControl& controls, Frame frame) {
  const CMat u = block_propagator(controls, model, frame, 2).dense(model.space());
  return computational_projection(to_computational_frame(u, model, frame, controls.duration()),
                                  model.space());
}

VirtualZ compensation_for(const GateResult& r) { return {r.phi_1, r.phi_2, r.global_phase}; }

Mat4 virtual_z_compensation(const GateResult& r) {
  Eigen::Vector4cd d;
  d << 1.0, std::polar(1.0, -r.phi_2), std::polar(1.0, -r.phi_1), std::polar(1.0, -(r.phi_1 + r.phi_2));
  return std::polar(1.0, -r.global_phase) * (d.asDiagonal() * r.block);
}

CMat apply_virtual_z(const CMat& u, const HilbertSpace& space, const VirtualZ& vz) {
  CMat out = u;
  for (std::size_t i = 0; i < space.dimension(); ++i)
    out.row(static_cast<Eigen::Index>(i)) *= std::polar(1.0, -vz_phase(space.label(i), vz));
  return out;
}

Mat4 cz_target() {
  Mat4 m = Mat4::Identity();
  m(3, 3) = -1.0;
  return m;
}

double average_gate_fidelity(const Mat4& m, const Mat4& target) {
  const cplx tr = (target.adjoint() * m).trace();
  return (std::norm(tr) + (m.adjoint() * m).trace().real()) / 20.0;
}

CMat local_unitary(const HilbertSpace& space, const Mat2& u1, const Mat2& u2) {
  auto extend = [](const Mat2& u, int d) {
    CMat e = CMat::Identity(d, d);
    e.topLeftCorner(2, 2) = u;
    return e;
  };
  const CMat e1 = extend(u1, space.dim(Mode::q1));
  const CMat e2 = extend(u2, space.dim(Mode::q2));
  const auto n = static_cast<Eigen::Index>(space.dimension());
  CMat out = CMat::Zero(n, n);
  for (std::size_t r = 0; r < space.dimension(); ++r) {
    const auto lr = space.label(r);
    for (std::size_t c = 0; c < space.dimension(); ++c) {
      const auto lc = space.label(c);
      if (lr[1] != lc[1]) continue;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e1(lr[0], lc[0]) * e2(lr[2], lc[2]);
    }
  }
  return out;
}

QuantumState QuantumState::from_vector(CVec psi) {
  QuantumState s;
  s.kind_ = Kind::vector;
  s.psi_ = std::move(psi);
  return s;
}

QuantumState QuantumState::from_density(CMat rho) {
  if (rho.rows() != rho.cols()) throw SimError(ErrorCode::config, "density matrix must be square");
  QuantumState s;
  s.kind_ = Kind::density;
  s.rho_ = std::move(rho);
  return s;
}

QuantumState QuantumState::basis(const HilbertSpace& space, int n1, int nc, int n2, Kind kind) {
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(space.dimension()));
  psi(static_cast<Eigen::Index>(space.index(n1, nc, n2))) = 1.0;
  if (kind == Kind::vector) return from_vector(psi);
  return from_density(psi * psi.adjoint());
}

std::size_t QuantumState::dimension() const {
  return static_cast<std::size_t>(kind_ == Kind::vector ? psi_.size() : rho_.rows());
}

const CVec& QuantumState::vector() const {
  if (kind_ != Kind::vector) throw SimError(ErrorCode::unsupported, "state is a density matrix");
  return psi_;
}

CMat QuantumState::density() const {
  if (kind_ == Kind::density) return rho_;
  return psi_ * psi_.adjoint();
}

RVec QuantumState::populations() const {
  if (kind_ == Kind::vector) return psi_.cwiseAbs2();
  return rho_.diagonal().real();
}

void QuantumState::validate(double tol) const {
  if (kind_ == Kind::vector) {
    if (std::abs(psi_.norm() - 1.0) > tol) throw SimError(ErrorCode::config, "state vector not normalized");
    return;
  }
  if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > tol) throw SimError(ErrorCode::config, "trace is not 1");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw SimError(ErrorCode::config, "density matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw SimError(ErrorCode::config, "density matrix not positive");
}

}  // namespace tcsim
