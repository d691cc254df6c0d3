#include "zoac/analysis/value_gap.hpp"

#include <cmath>

namespace zoac {

ValueGap value_gap(const StateValue& critic, std::span<const EpisodeRecord> episodes,
                   double gamma) {
  ValueGap out;
  double gap_sum = 0.0;
  double abs_sum = 0.0;
  for (const auto& ep : episodes) {
    const std::size_t T = ep.rewards.size();
    if (T == 0) continue;
    Mat obs(ep.observations.front().size(), static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) obs.col(static_cast<Eigen::Index>(t)) = ep.observations[t];
    const Vec v = critic.values(obs);
    double to_go = 0.0;
    for (std::size_t t = T; t-- > 0;) {
      to_go = ep.rewards[t] + gamma * to_go;
      gap_sum += v[static_cast<Eigen::Index>(t)] - to_go;
      abs_sum += std::abs(to_go);
    }
    out.states += T;
  }
  if (out.states > 0) {
    out.gap = gap_sum / static_cast<double>(out.states);
    out.mean_abs_value = abs_sum / static_cast<double>(out.states);
  }
  return out;
}

ValueGap value_gap(const StateValue& critic, const PolicySpec& spec, const ParamVector& theta,
                   Environment& env, const ObsNormalizer& normalizer, std::size_t episodes,
                   double gamma, std::uint64_t seed) {
  const CompiledPolicy policy(spec, theta);
  std::vector<EpisodeRecord> records;
  for (std::size_t e = 0; e < episodes; ++e) {
    RngStream stream = RngStream::derive(seed, {kEvalStreamTag, static_cast<std::uint64_t>(e)});
    records.push_back(run_episode(env, stream, policy, normalizer));
  }
  return value_gap(critic, records, gamma);
}

}  // namespace zoac
