#ifndef ZOAC_ANALYSIS_VALUE_GAP_HPP_
#define ZOAC_ANALYSIS_VALUE_GAP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "zoac/evaluation/critic.hpp"
#include "zoac/sampler/sampler.hpp"

namespace zoac {

inline constexpr std::uint64_t kEvalStreamTag = 0x4556414C;  // "EVAL"

struct ValueGap {
  // mean over visited states of V_w(s) - discounted reward-to-go from s
  double gap = 0.0;
  // mean |reward-to-go|, the scale the gap is judged against
  double mean_abs_value = 0.0;
  std::size_t states = 0;
};

ValueGap value_gap(const StateValue& critic, std::span<const EpisodeRecord> episodes,
                   double gamma);

// Runs `episodes` noise-free episodes of the deterministic policy; episode e
// resets from derive(seed, EVAL, e).
ValueGap value_gap(const StateValue& critic, const PolicySpec& spec, const ParamVector& theta,
                   Environment& env, const ObsNormalizer& normalizer, std::size_t episodes,
                   double gamma, std::uint64_t seed);

}  // namespace zoac

#endif  // ZOAC_ANALYSIS_VALUE_GAP_HPP_
