#include "oee/rng.hpp"

#include "oee/error.hpp"

namespace oee {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) fail(ErrorCode::InvalidParameter, "Rng::below(0)");
  // Smallest value from which a full block of n residues fits below 2^64.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

Rng Rng::restore(std::uint64_t seed, std::uint64_t draws) {
  Rng rng(seed);
  rng.engine_.discard(draws);
  rng.draws_ = draws;
  return rng;
}

}  // namespace oee
