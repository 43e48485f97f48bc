#include "tcsim/device_model.hpp"

#include <cmath>
#include <limits>

#include "tcsim/errors.hpp"
#include "tcsim/spectrum.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::q1: return "q1";
    case Mode::q2: return "q2";
    case Mode::coupler: return "coupler";
  }
  return "?";
}

double Frequencies::operator[](Mode m) const {
  switch (m) {
    case Mode::q1: return q1;
    case Mode::q2: return q2;
    case Mode::coupler: return coupler;
  }
  return 0.0;
}

double& Frequencies::operator[](Mode m) {
  switch (m) {
    case Mode::q1: return q1;
    case Mode::q2: return q2;
    default: return coupler;
  }
}

DeviceParams DeviceParams::nominal() {
  DeviceParams p;
  p.omega_max = {ghz(4.508), ghz(4.701), ghz(5.419)};
  p.alpha = {mhz(-290.0), mhz(-306.0), mhz(-124.0)};
  p.g_1c = mhz(100.0);
  p.g_2c = mhz(100.0);
  p.g_12 = mhz(5.0);
  p.t1 = {us(20.9), us(28.8), us(20.9)};
  p.t2 = {0.0, 0.0, 0.0};
  p.dims = {3, 3, 3};
  return p;
}

void DeviceParams::validate(bool require_third_level) const {
  for (int i = 0; i < 3; ++i) {
    if (!(omega_max[i] > 0.0)) throw SimError(ErrorCode::config, "omega_max must be positive");
    if (!(alpha[i] < 0.0)) throw SimError(ErrorCode::config, "anharmonicity must be negative");
    if (dims[i] < 2) throw SimError(ErrorCode::invalid_dimension, "truncation below 2 levels");
    if (require_third_level && dims[i] < 3)
      throw SimError(ErrorCode::invalid_dimension, "CZ simulation needs at least 3 levels");
    if (t1[i] < 0.0 || t2[i] < 0.0) throw SimError(ErrorCode::config, "negative coherence time");
    if (t1[i] > 0.0 && t2[i] > 2.0 * t1[i])
      throw SimError(ErrorCode::config, "T2 exceeds 2*T1");
  }
  if (!(g_1c > std::abs(g_12) && g_2c > std::abs(g_12)))
    throw SimError(ErrorCode::config, "qubit-coupler couplings must exceed the direct coupling");
}

double DeviceParams::relaxation_rate(Mode m) const {
  const double t = t1[index_of(m)];
  return t > 0.0 ? 1.0 / t : 0.0;
}

double DeviceParams::dephasing_rate(Mode m) const {
  const int i = index_of(m);
  const double t1i = t1[i];
  const double t2i = t2[i] > 0.0 ? t2[i] : t1i;
  if (!(t2i > 0.0)) return 0.0;
  const double rate = 1.0 / t2i - (t1i > 0.0 ? 0.5 / t1i : 0.0);
  return rate > 0.0 ? rate : 0.0;
}

double DeviceParams::t_phi(Mode m) const {
  const double r = dephasing_rate(m);
  return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

HilbertSpace::HilbertSpace(const std::array<int, 3>& dims)
    : d1_(dims[index_of(Mode::q1)]), dc_(dims[index_of(Mode::coupler)]), d2_(dims[index_of(Mode::q2)]) {
  if (d1_ < 2 || dc_ < 2 || d2_ < 2)
    throw SimError(ErrorCode::invalid_dimension, "truncation below 2 levels");
  size_ = static_cast<std::size_t>(d1_) * dc_ * d2_;
  sectors_.resize(static_cast<std::size_t>(d1_ + dc_ + d2_ - 2));
  position_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    auto& s = sectors_[static_cast<std::size_t>(excitations(i))];
    position_[i] = s.size();
    s.push_back(i);
  }
}

int HilbertSpace::dim(Mode m) const {
  switch (m) {
    case Mode::q1: return d1_;
    case Mode::q2: return d2_;
    default: return dc_;
  }
}

std::size_t HilbertSpace::index(int n1, int nc, int n2) const {
  return (static_cast<std::size_t>(n1) * dc_ + nc) * d2_ + n2;
}

std::array<int, 3> HilbertSpace::label(std::size_t i) const {
  const int n2 = static_cast<int>(i % d2_);
  const int nc = static_cast<int>((i / d2_) % dc_);
  const int n1 = static_cast<int>(i / (static_cast<std::size_t>(d2_) * dc_));
  return {n1, nc, n2};
}

int HilbertSpace::occupation(std::size_t i, Mode m) const {
  const auto l = label(i);
  switch (m) {
    case Mode::q1: return l[0];
    case Mode::coupler: return l[1];
    default: return l[2];
  }
}

int HilbertSpace::excitations(std::size_t i) const {
  const auto l = label(i);
  return l[0] + l[1] + l[2];
}

std::string HilbertSpace::label_string(std::size_t i) const {
  const auto l = label(i);
  return std::to_string(l[0]) + std::to_string(l[1]) + std::to_string(l[2]);
}

std::pair<int, std::size_t> HilbertSpace::sector_position(std::size_t i) const {
  return {excitations(i), position_[i]};
}

RMat HilbertSpace::embed(const RMat& op, Mode m) const {
  const RMat i1 = RMat::Identity(d1_, d1_);
  const RMat ic = RMat::Identity(dc_, dc_);
  const RMat i2 = RMat::Identity(d2_, d2_);
  const RMat& a = m == Mode::q1 ? op : i1;
  const RMat& b = m == Mode::coupler ? op : ic;
  const RMat& c = m == Mode::q2 ? op : i2;
  RMat out = RMat::Zero(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(size_));
  for (std::size_t r = 0; r < size_; ++r) {
    const auto lr = label(r);
    for (std::size_t s = 0; s < size_; ++s) {
      const auto ls = label(s);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
          a(lr[0], ls[0]) * b(lr[1], ls[1]) * c(lr[2], ls[2]);
    }
  }
  return out;
}

RMat annihilation_operator(int dim) {
  if (dim < 2) throw SimError(ErrorCode::invalid_dimension, "annihilation operator needs dim >= 2");
  RMat a = RMat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

RMat build_static_hamiltonian(const DeviceParams& params, const Frequencies& freqs) {
  std::size_t size = 1;
  for (int d : params.dims) {
    if (d < 2) throw SimError(ErrorCode::invalid_dimension, "truncation below 2 levels");
    size *= static_cast<std::size_t>(d);
  }
  if (size > params.max_dimension)
    throw SimError(ErrorCode::resource, "Hilbert space dimension " + std::to_string(size) +
                                            " exceeds cap " + std::to_string(params.max_dimension));
  const HilbertSpace space(params.dims);
  RMat h = RMat::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  std::array<RMat, 3> a;
  for (Mode m : all_modes) {
    a[index_of(m)] = space.embed(annihilation_operator(space.dim(m)), m);
    const RMat& op = a[index_of(m)];
    const RMat num = op.transpose() * op;
    h += freqs[m] * num;
    h += 0.5 * params.alpha[index_of(m)] * (op.transpose() * op.transpose() * op * op);
  }
  auto couple = [&](Mode x, Mode y, double g) {
    const RMat& ax = a[index_of(x)];
    const RMat& ay = a[index_of(y)];
    h += g * (ax.transpose() * ay + ax * ay.transpose());
  };
  couple(Mode::q1, Mode::coupler, params.g_1c);
  couple(Mode::q2, Mode::coupler, params.g_2c);
  couple(Mode::q1, Mode::q2, params.g_12);
  return h;
}

double effective_coupling(const DeviceParams& params, double omega1, double omega2, double omega_c) {
  const double d1 = omega1 - omega_c;
  const double d2 = omega2 - omega_c;
  const double scale = 1e-12 * std::max({std::abs(omega1), std::abs(omega2), std::abs(omega_c), 1.0});
  if (std::abs(d1) <= scale || std::abs(d2) <= scale)
    throw SimError(ErrorCode::singularity, "coupler resonant with a qubit");
  return 0.5 * params.g_1c * params.g_2c * (1.0 / d1 + 1.0 / d2) + params.g_12;
}

double compute_zz(const DeviceParams& params, const Frequencies& freqs) {
  for (int d : params.dims)
    if (d < 3) throw SimError(ErrorCode::invalid_dimension, "ZZ needs at least 3 levels per mode");
  const HilbertSpace space(params.dims);
  const DressedStates ds = label_eigenstates(build_static_hamiltonian(params, freqs), space);
  const std::size_t i000 = space.index(0, 0, 0);
  const std::size_t i100 = space.index(1, 0, 0);
  const std::size_t i001 = space.index(0, 0, 1);
  const std::size_t i101 = space.index(1, 0, 1);
  for (std::size_t i : {i000, i100, i001, i101}) {
    if (ds.overlaps(static_cast<Eigen::Index>(i)) < 0.5)
      throw SimError(ErrorCode::degenerate_labeling,
                     "eigenstate for |" + space.label_string(i) + "> is ambiguous");
  }
  auto e = [&](std::size_t i) { return ds.energies(static_cast<Eigen::Index>(i)); };
  return e(i101) + e(i000) - e(i100) - e(i001);
}

}  // namespace tcsim
