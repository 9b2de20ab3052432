#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "dhdp/errors.hpp"

namespace dhdp {

// All randomness in the project flows through this wrapper, so results
// depend only on (seed, stream). Stream separates chains sharing one
// master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Uniform draw in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
  }

  // Index draw proportional to nonnegative weights with the given total.
  std::size_t pick(std::span<const double> weights, double total) {
    if (!(total > 0.0)) {
      throw ContractViolation("sampling distribution has no positive mass");
    }
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    // Rounding can push u past the final accumulator; return the last
    // positive-weight entry.
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    throw ContractViolation("sampling distribution has no positive mass");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dhdp
