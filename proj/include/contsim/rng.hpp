#pragma once

#include <array>
#include <cstdint>

namespace contsim {

// Portable random stream: xoshiro256** seeded through splitmix64.
//
// Normal deviates use the inverse-CDF method (Wichura's AS241, PPND16) on one
// uniform each, so every normal consumes exactly one 64-bit draw. The central
// branch is pure rational arithmetic; only the tails touch std::log/std::sqrt.
// Golden traces depend on this choice; do not swap the method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1), never hitting either endpoint.
  double uniform_open01();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Standard normal deviate.
  double normal();

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

// Standard normal quantile function. p must lie in (0, 1).
double normal_quantile(double p);

// splitmix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace contsim
