#ifndef ZOAC_NOISE_NOISE_TABLE_HPP_
#define ZOAC_NOISE_NOISE_TABLE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "zoac/numkit/rng.hpp"
#include "zoac/types.hpp"

namespace zoac {

inline constexpr std::size_t kDefaultNoiseTableSize = 25'000'000;

// Offset of a perturbation slice in the shared table. Workers exchange these,
// never the perturbation vectors themselves.
struct NoiseIndex {
  std::size_t offset = 0;
  auto operator<=>(const NoiseIndex&) const = default;
};

class NoiseIndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Immutable pool of standard normals. Entry i is gaussian_at(seed, i), so the
// table is regenerable bit-exactly from (seed, size) and is filled in parallel
// chunks without changing its contents. Copies share the same storage.
class NoiseTable {
 public:
  // Throws std::invalid_argument when size < dim.
  static NoiseTable create(std::uint64_t seed, std::size_t size, std::size_t dim);

  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return values_->size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> values() const { return *values_; }

  // Slice [offset, offset + dim). Throws NoiseIndexError when out of range.
  Eigen::Map<const Vec> slice(NoiseIndex idx) const;
  bool valid(NoiseIndex idx) const { return idx.offset + dim_ <= size(); }

 private:
  std::uint64_t seed_ = 0;
  std::size_t dim_ = 0;
  std::shared_ptr<const std::vector<double>> values_;
};

// theta + sigma * table[idx : idx + d]; theta is not modified.
ParamVector perturb(const ParamVector& theta, NoiseIndex idx, double sigma,
                    const NoiseTable& table);

// Uniform valid offset in [0, size - dim].
NoiseIndex draw_index(RngStream& stream, const NoiseTable& table);

// sum_i weights[i] * eps_i, accumulated in the order given.
Vec weighted_noise_sum(const NoiseTable& table, std::span<const NoiseIndex> indices,
                       std::span<const double> weights);

}  // namespace zoac

#endif  // ZOAC_NOISE_NOISE_TABLE_HPP_
