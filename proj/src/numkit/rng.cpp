#include "zoac/numkit/rng.hpp"

#include <cmath>
#include <numbers>

namespace zoac {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double box_muller(std::uint64_t a, std::uint64_t b) {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = to_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream RngStream::derive(std::uint64_t master,
                            std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master + kGolden);
  for (std::uint64_t k : keys) {
    h = splitmix64(h ^ splitmix64(k + kGolden));
  }
  return RngStream(h);
}

std::uint64_t RngStream::next_u64() {
  return splitmix64(seed_ + (counter_++ + 1) * kGolden);
}

double RngStream::uniform() { return to_unit(next_u64()); }

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Rejection on the top of the range keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double RngStream::gaussian() {
  const std::uint64_t a = next_u64();
  const std::uint64_t b = next_u64();
  return box_muller(a, b);
}

Vec RngStream::gaussian(Eigen::Index len) {
  Vec out(len);
  for (Eigen::Index i = 0; i < len; ++i) out[i] = gaussian();
  return out;
}

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
  RngStream s(seed, 2 * index);
  return s.gaussian();
}

}  // namespace zoac
