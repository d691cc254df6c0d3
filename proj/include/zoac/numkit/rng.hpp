#ifndef ZOAC_NUMKIT_RNG_HPP_
#define ZOAC_NUMKIT_RNG_HPP_

#include <cstdint>
#include <initializer_list>

#include "zoac/types.hpp"

namespace zoac {

// Counter-based random stream. The i-th 64-bit draw is the SplitMix64
// finalizer applied to seed + i * golden_gamma, so any position of the
// stream can be reproduced from (seed, counter) alone.
//
// Gaussians use the cosine branch of Box-Muller on two consecutive draws;
// each normal consumes exactly two counter steps. Bit-exactness across
// platforms therefore depends only on std::log/std::cos/std::sqrt.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  // Stream keyed by a master seed and a tuple of ids, e.g.
  // (master, tag, iteration, worker, segment).
  static RngStream derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer on [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);
  double gaussian();
  Vec gaussian(Eigen::Index len);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Standard normal at absolute stream position `index` (counter 2*index).
double gaussian_at(std::uint64_t seed, std::uint64_t index);

}  // namespace zoac

#endif  // ZOAC_NUMKIT_RNG_HPP_
