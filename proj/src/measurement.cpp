#include <algorithm>
#include <cmath>

#include "tcsim/errors.hpp"
#include "tcsim/evolution.hpp"
#include "tcsim/rng.hpp"

namespace tcsim {

std::map<std::string, std::uint64_t> measure(const QuantumState& state, const HilbertSpace& space,
                                             std::uint64_t shots, double assignment_error, std::uint64_t seed) {
  if (shots < 1) throw SimError(ErrorCode::config, "shots must be at least 1");
  if (!(assignment_error >= 0.0 && assignment_error < 0.5))
    throw SimError(ErrorCode::config, "assignment error must lie in [0, 0.5)");
  if (state.dimension() != space.dimension())
    throw SimError(ErrorCode::invalid_dimension, "state dimension does not match the space");

  // Marginal over the coupler: outcome (n1, n2).
  const int d1 = space.dim(Mode::q1);
  const int d2 = space.dim(Mode::q2);
  std::vector<double> probs(static_cast<std::size_t>(d1 * d2), 0.0);
  const RVec pop = state.populations();
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto l = space.label(i);
    probs[static_cast<std::size_t>(l[0] * d2 + l[2])] += std::max(0.0, pop(static_cast<Eigen::Index>(i)));
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0)) throw SimError(ErrorCode::config, "state has no population");

  Rng rng(derive_seed(seed, {0x6d65617375ULL}));
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) break;
    }
    int n1 = static_cast<int>(k) / d2;
    int n2 = static_cast<int>(k) % d2;
    if (n1 <= 1 && rng.bernoulli(assignment_error)) n1 ^= 1;
    if (n2 <= 1 && rng.bernoulli(assignment_error)) n2 ^= 1;
    ++counts[std::to_string(n1) + std::to_string(n2)];
  }
  return counts;
}

}  // namespace tcsim
