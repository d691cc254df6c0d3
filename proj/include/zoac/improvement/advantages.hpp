#ifndef ZOAC_IMPROVEMENT_ADVANTAGES_HPP_
#define ZOAC_IMPROVEMENT_ADVANTAGES_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "zoac/evaluation/value_targets.hpp"
#include "zoac/noise/noise_table.hpp"

namespace zoac {

struct DirectionAdvantage {
  NoiseIndex noise;
  double advantage = 0.0;
  std::size_t length = 0;
};

// Per-segment GAE over the segment's own transitions:
//   A = sum_{k<len} (gamma lambda)^k [r_k + gamma V(s_{k+1}) - V(s_k)]
// accumulated front to back. Terminal segments bootstrap with 0.
std::vector<DirectionAdvantage> compute_segment_advantages(const IterationBatch& batch,
                                                           const SegmentValues& values,
                                                           double gamma, double lambda);
std::vector<DirectionAdvantage> compute_segment_advantages(const IterationBatch& batch,
                                                           const StateValue& value,
                                                           double gamma, double lambda);

// (A - mean) / max(std, 1e-8) over the whole set (population std).
std::vector<DirectionAdvantage> normalize_advantages(std::vector<DirectionAdvantage> advs);

// (1 / (count sigma)) sum_i A_i eps_i, an ascent direction.
Vec zoac_gradient(std::span<const DirectionAdvantage> advs, const NoiseTable& table,
                  double sigma);

// Keeps the b largest advantages; ties go to the lower noise offset. The
// result is ordered by descending advantage.
std::vector<DirectionAdvantage> sift_top_directions(std::span<const DirectionAdvantage> advs,
                                                    std::size_t b);

// A' = beta A + (1 - beta)(1 - usage).
double masked_advantage(double normalized_advantage, double usage, double beta);

// Linear anneal from `start` at iteration 0 to `end` at `total`, held after.
double beta_schedule(std::size_t iteration, std::size_t total, double start = 1.0,
                     double end = 0.5);

}  // namespace zoac

#endif  // ZOAC_IMPROVEMENT_ADVANTAGES_HPP_
