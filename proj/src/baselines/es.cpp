#include "zoac/baselines/es.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace zoac {

std::vector<EsDirection> es_directions(const EsBatch& batch) {
  std::vector<EsDirection> out;
  out.reserve(batch.trajectories.size());
  for (const auto& t : batch.trajectories) out.push_back({t.noise, t.discounted_return});
  return out;
}

Vec centered_rank(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("centered_rank: empty input");
  const std::size_t n = values.size();
  Vec out = Vec::Zero(static_cast<Eigen::Index>(n));
  if (n == 1) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) {
      out[static_cast<Eigen::Index>(order[k])] = rank / static_cast<double>(n - 1) - 0.5;
    }
    i = j + 1;
  }
  return out;
}

Vec es_gradient(std::span<const EsDirection> dirs, const NoiseTable& table, double sigma,
                bool shaped) {
  if (dirs.empty()) throw std::invalid_argument("es_gradient: no directions");
  std::vector<NoiseIndex> idx;
  std::vector<double> w;
  for (const auto& d : dirs) {
    idx.push_back(d.noise);
    w.push_back(d.ret);
  }
  if (shaped) {
    const Vec ranks = centered_rank(w);
    std::copy(ranks.begin(), ranks.end(), w.begin());
  }
  return weighted_noise_sum(table, idx, w) *
         (1.0 / (static_cast<double>(dirs.size()) * sigma));
}

}  // namespace zoac
