#ifndef ZOAC_EVALUATION_VALUE_TARGETS_HPP_
#define ZOAC_EVALUATION_VALUE_TARGETS_HPP_

#include <cstddef>
#include <vector>

#include "zoac/evaluation/critic.hpp"
#include "zoac/sampler/sampler.hpp"

namespace zoac {

// V at every observation of every segment: entry s has length k_s + 1 and its
// last element is the bootstrap value, forced to 0 for terminal segments.
using SegmentValues = std::vector<Vec>;

SegmentValues evaluate_segment_values(const IterationBatch& batch, const StateValue& value);

struct ValueTargetSet {
  Mat observations;  // columns, one per collected state
  Vec targets;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
};

// lambda-return targets over each trajectory fragment (not per segment):
//   G_t = V(s_t) + sum_k (gamma lambda)^k delta_{t+k}
// computed with the backward recursion A_t = delta_t + gamma lambda A_{t+1}.
ValueTargetSet compute_value_targets(const IterationBatch& batch, const SegmentValues& values,
                                     double gamma, double lambda);
ValueTargetSet compute_value_targets(const IterationBatch& batch, const StateValue& value,
                                     double gamma, double lambda);

struct CriticUpdateResult {
  std::vector<double> epoch_loss;  // mean 0.5 (V - G)^2 per epoch
  std::size_t steps = 0;
};

// M epochs of shuffled minibatch Adam on 0.5 (V_w(s) - G)^2. The targets are
// held fixed for the whole update.
CriticUpdateResult critic_update(CriticNet& critic, const ValueTargetSet& targets,
                                 std::size_t batch_size, std::size_t epochs, RngStream& stream);

}  // namespace zoac

#endif  // ZOAC_EVALUATION_VALUE_TARGETS_HPP_
