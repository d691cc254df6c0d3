#include "zoac/improvement/advantages.hpp"

#include <algorithm>
#include <cmath>

namespace zoac {

std::vector<DirectionAdvantage> compute_segment_advantages(const IterationBatch& batch,
                                                           const SegmentValues& values,
                                                           double gamma, double lambda) {
  if (values.size() != batch.segments.size()) {
    throw std::invalid_argument("compute_segment_advantages: values do not match batch");
  }
  const double gl = gamma * lambda;
  std::vector<DirectionAdvantage> out;
  out.reserve(batch.segments.size());
  for (std::size_t s = 0; s < batch.segments.size(); ++s) {
    const Segment& seg = batch.segments[s];
    const Vec& v = values[s];
    double discount = 1.0;
    double adv = 0.0;
    for (std::size_t k = 0; k < seg.length(); ++k) {
      adv += discount * (seg.rewards[k] + gamma * v[k + 1] - v[k]);
      discount *= gl;
    }
    out.push_back({seg.noise, adv, seg.length()});
  }
  return out;
}

std::vector<DirectionAdvantage> compute_segment_advantages(const IterationBatch& batch,
                                                           const StateValue& value,
                                                           double gamma, double lambda) {
  return compute_segment_advantages(batch, evaluate_segment_values(batch, value), gamma,
                                    lambda);
}

std::vector<DirectionAdvantage> normalize_advantages(std::vector<DirectionAdvantage> advs) {
  if (advs.empty()) throw std::invalid_argument("normalize_advantages: empty set");
  const double n = static_cast<double>(advs.size());
  double mean = 0.0;
  for (const auto& a : advs) mean += a.advantage;
  mean /= n;
  double var = 0.0;
  for (const auto& a : advs) var += (a.advantage - mean) * (a.advantage - mean);
  const double sd = std::max(std::sqrt(var / n), 1e-8);
  for (auto& a : advs) a.advantage = (a.advantage - mean) / sd;
  return advs;
}

Vec zoac_gradient(std::span<const DirectionAdvantage> advs, const NoiseTable& table,
                  double sigma) {
  if (advs.empty()) throw std::invalid_argument("zoac_gradient: no directions");
  std::vector<NoiseIndex> idx;
  std::vector<double> w;
  idx.reserve(advs.size());
  w.reserve(advs.size());
  for (const auto& a : advs) {
    idx.push_back(a.noise);
    w.push_back(a.advantage);
  }
  return weighted_noise_sum(table, idx, w) *
         (1.0 / (static_cast<double>(advs.size()) * sigma));
}

std::vector<DirectionAdvantage> sift_top_directions(std::span<const DirectionAdvantage> advs,
                                                    std::size_t b) {
  if (b < 1 || b > advs.size()) {
    throw std::out_of_range("sift_top_directions: b must lie in [1, count]");
  }
  std::vector<DirectionAdvantage> sorted(advs.begin(), advs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    if (x.advantage != y.advantage) return x.advantage > y.advantage;
    return x.noise.offset < y.noise.offset;
  });
  sorted.resize(b);
  return sorted;
}

double masked_advantage(double normalized_advantage, double usage, double beta) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("masked_advantage: beta");
  if (usage < 0.0 || usage > 1.0) throw std::invalid_argument("masked_advantage: usage");
  return beta * normalized_advantage + (1.0 - beta) * (1.0 - usage);
}

double beta_schedule(std::size_t iteration, std::size_t total, double start, double end) {
  if (total == 0 || iteration >= total) return total == 0 ? start : end;
  const double frac = static_cast<double>(iteration) / static_cast<double>(total);
  return start + (end - start) * frac;
}

}  // namespace zoac
