#include "tcsim/spectrum.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace tcsim {

DressedStates label_eigenstates(const RMat& h, const HilbertSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.dimension());
  DressedStates out;
  out.energies = RVec::Zero(n);
  out.vectors = RMat::Zero(n, n);
  out.overlaps = RVec::Zero(n);
  for (const auto& idx : space.sectors()) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    RMat block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        block(r, c) = h(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
    Eigen::SelfAdjointEigenSolver<RMat> es(block);
    const RMat& v = es.eigenvectors();

    // Greedy assignment on |<bare|eigen>|^2, largest first.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(k * k));
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index e = 0; e < k; ++e) pairs.emplace_back(b, e);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
      return v(x.first, x.second) * v(x.first, x.second) > v(y.first, y.second) * v(y.first, y.second);
    });
    std::vector<bool> bare_used(static_cast<std::size_t>(k), false);
    std::vector<bool> eig_used(static_cast<std::size_t>(k), false);
    for (const auto& [b, e] : pairs) {
      if (bare_used[static_cast<std::size_t>(b)] || eig_used[static_cast<std::size_t>(e)]) continue;
      bare_used[static_cast<std::size_t>(b)] = true;
      eig_used[static_cast<std::size_t>(e)] = true;
      const auto gi = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]);
      const double sign = v(b, e) < 0.0 ? -1.0 : 1.0;
      out.energies(gi) = es.eigenvalues()(e);
      out.overlaps(gi) = v(b, e) * v(b, e);
      for (Eigen::Index r = 0; r < k; ++r)
        out.vectors(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]), gi) = sign * v(r, e);
    }
  }
  return out;
}

}  // namespace tcsim
