#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tcsim {

std::uint64_t splitmix64(std::uint64_t x);

/// Stream seed for a work item keyed by the master seed and a list of indices.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

/// mt19937_64 with distribution code that does not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                          // [0, 1)
  std::uint64_t index(std::uint64_t bound);  // [0, bound)
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace tcsim
