#include "tcsim/clifford.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <deque>

#include "tcsim/errors.hpp"
#include "tcsim/rng.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

std::string to_string(Pulse1 p) {
  switch (p) {
    case Pulse1::id: return "I";
    case Pulse1::x90: return "X90";
    case Pulse1::mx90: return "-X90";
    case Pulse1::y90: return "Y90";
    case Pulse1::my90: return "-Y90";
    case Pulse1::x180: return "X180";
    case Pulse1::y180: return "Y180";
  }
  return "?";
}

namespace {

Mat2 rotation(double theta, double nx, double ny) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Mat2 m;
  m << c, cplx(-ny * s, -nx * s), cplx(ny * s, -nx * s), c;
  return m;
}

template <class M>
std::string canonical_key(const M& u) {
  cplx ref = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (std::abs(u.data()[i]) > 1e-3) {
      ref = std::conj(u.data()[i]) / std::abs(u.data()[i]);
      break;
    }
  std::string k(static_cast<std::size_t>(u.size()) * 2 * sizeof(std::int32_t), '\0');
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const cplx v = u.data()[i] * ref;
    const std::array<std::int32_t, 2> r{static_cast<std::int32_t>(std::llround(v.real() * 1e6)),
                                        static_cast<std::int32_t>(std::llround(v.imag() * 1e6))};
    std::memcpy(k.data() + static_cast<std::size_t>(i) * sizeof(r), r.data(), sizeof(r));
  }
  return k;
}

}  // namespace

Mat2 pulse_unitary(Pulse1 p) {
  switch (p) {
    case Pulse1::id: return Mat2::Identity();
    case Pulse1::x90: return rotation(pi / 2, 1, 0);
    case Pulse1::mx90: return rotation(-pi / 2, 1, 0);
    case Pulse1::y90: return rotation(pi / 2, 0, 1);
    case Pulse1::my90: return rotation(-pi / 2, 0, 1);
    case Pulse1::x180: return rotation(pi, 1, 0);
    case Pulse1::y180: return rotation(pi, 0, 1);
  }
  return Mat2::Identity();
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

Mat4 cz_unitary() {
  Mat4 m = Mat4::Identity();
  m(3, 3) = -1.0;
  return m;
}

Mat4 layer_unitary(const Layer& layer) {
  return layer.cz ? cz_unitary() : kron(pulse_unitary(layer.q1), pulse_unitary(layer.q2));
}

int CliffordCircuit::cz_count() const {
  int n = 0;
  for (const auto& l : layers) n += l.cz ? 1 : 0;
  return n;
}

double phase_insensitive_overlap(const Mat4& u, const Mat4& v) { return std::abs((u.adjoint() * v).trace()) / 4.0; }

std::vector<std::vector<Pulse1>> single_qubit_cliffords() {
  static const std::array<Pulse1, 6> gens{Pulse1::x90, Pulse1::mx90, Pulse1::y90,
                                          Pulse1::my90, Pulse1::x180, Pulse1::y180};
  std::vector<std::vector<Pulse1>> out{{}};
  std::vector<Mat2> mats{Mat2::Identity()};
  std::unordered_map<std::string, std::size_t> seen{{canonical_key(mats[0]), 0}};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (Pulse1 g : gens) {
      const Mat2 u = pulse_unitary(g) * mats[head];
      if (!seen.emplace(canonical_key(u), out.size()).second) continue;
      auto seq = out[head];
      seq.push_back(g);
      out.push_back(std::move(seq));
      mats.push_back(u);
    }
  }
  return out;
}

std::string CliffordGroup::key(const Mat4& u) { return canonical_key(u); }

void CliffordGroup::insert(CliffordCircuit c) {
  c.index = elements_.size();
  lookup_.emplace(key(c.unitary), c.index);
  elements_.push_back(std::move(c));
}

CliffordGroup::CliffordGroup() {
  const auto c1 = single_qubit_cliffords();
  std::vector<CliffordCircuit> locals;
  locals.reserve(c1.size() * c1.size());
  for (const auto& a : c1) {
    for (const auto& b : c1) {
      CliffordCircuit c;
      Mat2 ua = Mat2::Identity();
      Mat2 ub = Mat2::Identity();
      for (Pulse1 p : a) ua = pulse_unitary(p) * ua;
      for (Pulse1 p : b) ub = pulse_unitary(p) * ub;
      c.unitary = kron(ua, ub);
      for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k)
        c.layers.push_back(Layer{false, k < a.size() ? a[k] : Pulse1::id, k < b.size() ? b[k] : Pulse1::id});
      locals.push_back(std::move(c));
    }
  }
  for (const auto& c : locals) insert(c);

  // Each new level is a union of cosets L * CZ * g of the local subgroup.
  std::size_t begin = 0;
  std::size_t end = elements_.size();
  const Mat4 cz = cz_unitary();
  while (begin < end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Mat4 h = cz * elements_[i].unitary;
      if (lookup_.count(key(h))) continue;
      const std::vector<Layer> base = [&] {
        auto l = elements_[i].layers;
        l.push_back(Layer{true});
        return l;
      }();
      for (const auto& loc : locals) {
        CliffordCircuit c;
        c.unitary = loc.unitary * h;
        c.layers = base;
        c.layers.insert(c.layers.end(), loc.layers.begin(), loc.layers.end());
        insert(std::move(c));
      }
    }
    begin = end;
    end = elements_.size();
  }
  if (elements_.size() != 11520)
    throw SimError(ErrorCode::resource, "Clifford enumeration produced " + std::to_string(elements_.size()));
}

const CliffordGroup& CliffordGroup::instance() {
  static const CliffordGroup group;
  return group;
}

std::optional<std::size_t> CliffordGroup::find(const Mat4& u) const {
  if ((u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff() > 1e-6) return std::nullopt;
  const auto it = lookup_.find(key(u));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t CliffordGroup::inverse(std::size_t i) const { return *find(elements_.at(i).unitary.adjoint()); }

std::size_t CliffordGroup::compose(std::size_t a, std::size_t b) const {
  return *find(elements_.at(b).unitary * elements_.at(a).unitary);
}

RbSequence rb_sequence(int m, const std::optional<Mat4>& interleave, std::uint64_t seed) {
  if (m < 1) throw SimError(ErrorCode::config, "sequence length must be at least 1");
  const CliffordGroup& g = CliffordGroup::instance();
  std::optional<std::size_t> inter;
  if (interleave) {
    inter = g.find(*interleave);
    if (!inter) throw SimError(ErrorCode::invalid_interleave, "interleaved gate is not a two-qubit Clifford");
  }
  Rng rng(seed);
  RbSequence seq;
  Mat4 total = Mat4::Identity();
  for (int k = 0; k < m; ++k) {
    const auto e = static_cast<std::size_t>(rng.index(g.size()));
    seq.steps.push_back({e, false});
    total = g[e].unitary * total;
    if (inter) {
      seq.steps.push_back({*inter, true});
      total = g[*inter].unitary * total;
    }
  }
  seq.recovery = *g.find(total.adjoint());
  return seq;
}

Mat4 sequence_unitary(const RbSequence& seq, bool with_recovery) {
  const CliffordGroup& g = CliffordGroup::instance();
  Mat4 u = Mat4::Identity();
  for (const auto& s : seq.steps)
    for (const auto& l : g[s.element].layers) u = layer_unitary(l) * u;
  if (with_recovery)
    for (const auto& l : g[seq.recovery].layers) u = layer_unitary(l) * u;
  return u;
}

}  // namespace tcsim
