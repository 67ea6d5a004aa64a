#pragma once

#include "demix/types.hpp"

#include <cstdint>
#include <random>

namespace demix {

/// Seeded generator for all randomness in the library. Instance files record
/// the family ("mt19937_64"); draw order is part of every sampling contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }

  /// Circularly-symmetric complex normal with E|z|^2 = 1 (real and imaginary
  /// parts independent with variance 1/2).
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re * kInvSqrt2, im * kInvSqrt2);
  }

  double uniform() { return uniform_(gen_); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen_);
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// SplitMix64 mixing step (Steele, Lea, Flood 2014), used to derive
/// per-trial sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Documented sub-seed rule: master XOR mix(mix(cell) XOR mix(trial + tag)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                    std::uint64_t trial) {
  return master ^ splitmix64(splitmix64(cell) ^ splitmix64(trial + 0x517cc1b727220a95ULL));
}

}  // namespace demix
