#include "tcsim/errors.hpp"
#include "tcsim/evolution.hpp"

namespace tcsim {

SystemModel::SystemModel(Device device)
    : device_(std::move(device)), space_(device_.params.dims), idle_(device_.idle()) {
  device_.params.validate();
  const RMat h0 = build_static_hamiltonian(device_.params, Frequencies{0.0, 0.0, 0.0});
  std::array<RMat, 3> lower;
  for (Mode m : all_modes) lower[index_of(m)] = space_.embed(annihilation_operator(space_.dim(m)), m);

  const auto& sectors = space_.sectors();
  terms_.resize(sectors.size());
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const auto& idx = sectors[s];
    const auto n = static_cast<Eigen::Index>(idx.size());
    SectorTerms& t = terms_[s];
    t.anharmonic = RVec::Zero(n);
    t.coupling = RMat::Zero(n, n);
    for (Mode m : all_modes) t.occupation[index_of(m)] = RVec::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto gr = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]);
      t.anharmonic(r) = h0(gr, gr);
      for (Mode m : all_modes)
        t.occupation[index_of(m)](r) = space_.occupation(static_cast<std::size_t>(gr), m);
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == r) continue;
        t.coupling(r, c) = h0(gr, static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
      }
    }
    for (Mode m : all_modes) {
      if (s == 0) {
        t.lowering[index_of(m)] = RMat::Zero(0, n);
        continue;
      }
      const auto& below = sectors[s - 1];
      RMat blk(static_cast<Eigen::Index>(below.size()), n);
      for (std::size_t r = 0; r < below.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
          blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              lower[index_of(m)](static_cast<Eigen::Index>(below[r]), static_cast<Eigen::Index>(idx[c]));
      t.lowering[index_of(m)] = blk;
    }
  }

  dressed_ = label_eigenstates(hamiltonian(idle_), space_);
  dressed_blocks_.resize(sectors.size());
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const auto& idx = sectors[s];
    const auto n = static_cast<Eigen::Index>(idx.size());
    RMat v(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        v(r, c) = dressed_.vectors(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]),
                                   static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
    dressed_blocks_[s] = v;
  }

  auto e = [&](int n1, int nc, int n2) {
    return dressed_.energies(static_cast<Eigen::Index>(space_.index(n1, nc, n2)));
  };
  const double e0 = e(0, 0, 0);
  const double w1 = e(1, 0, 0) - e0;
  const double wc = e(0, 1, 0) - e0;
  const double w2 = e(0, 0, 1) - e0;
  omega_ref_ = 0.5 * (w1 + w2);
  frame_energies_ = RVec::Zero(static_cast<Eigen::Index>(space_.dimension()));
  for (std::size_t i = 0; i < space_.dimension(); ++i) {
    const auto l = space_.label(i);
    frame_energies_(static_cast<Eigen::Index>(i)) = e0 + l[0] * w1 + l[1] * wc + l[2] * w2;
  }
}

Frequencies SystemModel::frequencies(const SampledControl& c, std::size_t step) const {
  return device_.frequencies_at({c.flux[0][step], c.flux[1][step], c.flux[2][step]});
}

RMat SystemModel::sector_hamiltonian(int s, const Frequencies& f) const {
  const SectorTerms& t = terms_[static_cast<std::size_t>(s)];
  RMat h = t.coupling;
  RVec d = t.anharmonic;
  for (Mode m : all_modes) d += f[m] * t.occupation[index_of(m)];
  h.diagonal() += d;
  return h;
}

RMat SystemModel::hamiltonian(const Frequencies& f) const {
  const auto n = static_cast<Eigen::Index>(space_.dimension());
  RMat h = RMat::Zero(n, n);
  const auto& sectors = space_.sectors();
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const RMat hs = sector_hamiltonian(static_cast<int>(s), f);
    const auto& idx = sectors[s];
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        h(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c])) =
            hs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return h;
}

std::array<std::size_t, 4> SystemModel::computational_indices() const {
  return {space_.index(0, 0, 0), space_.index(0, 0, 1), space_.index(1, 0, 0), space_.index(1, 0, 1)};
}

const RVec& SystemModel::sector_occupation(int s, Mode m) const {
  return terms_[static_cast<std::size_t>(s)].occupation[index_of(m)];
}

const RMat& SystemModel::sector_lowering(int s, Mode m) const {
  return terms_[static_cast<std::size_t>(s)].lowering[index_of(m)];
}

}  // namespace tcsim
