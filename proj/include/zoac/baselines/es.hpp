#ifndef ZOAC_BASELINES_ES_HPP_
#define ZOAC_BASELINES_ES_HPP_

#include <span>
#include <vector>

#include "zoac/noise/noise_table.hpp"
#include "zoac/sampler/sampler.hpp"

namespace zoac {

struct EsDirection {
  NoiseIndex noise;
  double ret = 0.0;
};

std::vector<EsDirection> es_directions(const EsBatch& batch);

// Ranks mapped uniformly onto [-0.5, 0.5] via rank / (n - 1) - 0.5, with tied
// values sharing their average rank. A single value maps to 0.
Vec centered_rank(std::span<const double> values);

// (1 / (n sigma)) sum_i w_i eps_i with w = raw returns or centered ranks.
Vec es_gradient(std::span<const EsDirection> dirs, const NoiseTable& table, double sigma,
                bool shaped);

}  // namespace zoac

#endif  // ZOAC_BASELINES_ES_HPP_
