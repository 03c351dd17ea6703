#pragma once

#include <cstdint>
#include <random>

namespace oee {

// Seeded 64-bit stream shared by every stochastic draw of a model.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The derived draws (uniform, below) are computed here rather than
// through <random> distributions, whose algorithms are implementation-defined,
// so a run replays bit-exactly across standard libraries. The stream position
// is summarised by (seed, draws) and can be restored from it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // One draw; true with probability p. p <= 0 never hits, p >= 1 always does.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n); n must be positive. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  static Rng restore(std::uint64_t seed, std::uint64_t draws);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.seed_ == b.seed_ && a.draws_ == b.draws_;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
};

}  // namespace oee
