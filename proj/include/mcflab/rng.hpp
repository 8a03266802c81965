#pragma once

#include <cstdint>
#include <random>

namespace mcflab {

// mt19937_64 with explicit output mapping; std::uniform_real_distribution is
// not pinned across standard library versions, this is.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() { return (gen() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // [0, n)
  int index(int n) { return (int)(gen() % (std::uint64_t)n); }
};

}  // namespace mcflab
