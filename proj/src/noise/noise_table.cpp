#include "zoac/noise/noise_table.hpp"

#include <algorithm>
#include <string>
#include <thread>

namespace zoac {

NoiseTable NoiseTable::create(std::uint64_t seed, std::size_t size, std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("NoiseTable: dimension must be >= 1");
  if (size < dim) {
    throw std::invalid_argument("NoiseTable: size " + std::to_string(size) +
                                " is smaller than parameter dimension " +
                                std::to_string(dim));
  }
  auto values = std::make_shared<std::vector<double>>(size);
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  const std::size_t chunk = (size + threads - 1) / threads;
  auto fill = [&values, seed, size, chunk](std::size_t t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(size, begin + chunk);
    if (begin >= end) return;
    RngStream stream(seed, 2 * begin);
    for (std::size_t i = begin; i < end; ++i) (*values)[i] = stream.gaussian();
  };
  if (threads == 1 || size < 100000) {
    for (std::size_t t = 0; t < threads; ++t) fill(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(fill, t);
    for (auto& th : pool) th.join();
  }
  NoiseTable table;
  table.seed_ = seed;
  table.dim_ = dim;
  table.values_ = std::move(values);
  return table;
}

Eigen::Map<const Vec> NoiseTable::slice(NoiseIndex idx) const {
  if (!valid(idx)) {
    throw NoiseIndexError("noise index " + std::to_string(idx.offset) +
                          " out of range for table of size " + std::to_string(size()));
  }
  return {values_->data() + idx.offset, static_cast<Eigen::Index>(dim_)};
}

ParamVector perturb(const ParamVector& theta, NoiseIndex idx, double sigma,
                    const NoiseTable& table) {
  if (static_cast<std::size_t>(theta.size()) != table.dim()) {
    throw std::invalid_argument("perturb: parameter dimension mismatch");
  }
  return theta + sigma * table.slice(idx);
}

NoiseIndex draw_index(RngStream& stream, const NoiseTable& table) {
  return {stream.uniform_index(table.size() - table.dim() + 1)};
}

Vec weighted_noise_sum(const NoiseTable& table, std::span<const NoiseIndex> indices,
                       std::span<const double> weights) {
  if (indices.size() != weights.size()) {
    throw std::invalid_argument("weighted_noise_sum: length mismatch");
  }
  Vec out = Vec::Zero(static_cast<Eigen::Index>(table.dim()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out += weights[i] * table.slice(indices[i]);
  }
  return out;
}

}  // namespace zoac
