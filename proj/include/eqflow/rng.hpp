#pragma once

#include <cstdint>
#include <string_view>

#include "eqflow/common.hpp"

namespace eqflow {

// splitmix64 finalizer; used both as the core generator step and to
// whiten derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Derive an independent stream seed from a base seed and a role label
// (e.g. "init", "noise") or a tuple of integers (epoch, batch, ...).
// Deterministic across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::string_view role);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);
std::uint64_t derive_seed(std::uint64_t base, std::string_view role,
                          std::uint64_t a, std::uint64_t b = 0);

// Counter-based generator with portable draw sequences. Avoids
// std::*_distribution so streams are reproducible across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int n);                // {0, ..., n-1}
  double normal();                       // N(0, 1), Box-Muller
  Vec normal_vec(int n);
  Mat normal_mat(int rows, int cols);
  Vec uniform_vec(int n, double lo, double hi);
  std::vector<int> permutation(int n);   // Fisher-Yates

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eqflow
