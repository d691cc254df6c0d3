#ifndef ZOAC_SAMPLER_SAMPLER_HPP_
#define ZOAC_SAMPLER_SAMPLER_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "zoac/envs/env.hpp"
#include "zoac/envs/env_spec.hpp"
#include "zoac/noise/noise_table.hpp"
#include "zoac/numkit/running_stat.hpp"
#include "zoac/policies/policy.hpp"

namespace zoac {

// Stream tags for RngStream::derive.
inline constexpr std::uint64_t kEnvStreamTag = 0x454E56;      // "ENV"
inline constexpr std::uint64_t kNoiseStreamTag = 0x4E4F4953;  // "NOIS"

// Up to N steps driven by one perturbation.
struct Segment {
  NoiseIndex noise;
  // Normalized observations, k + 1 entries; the last is the bootstrap state.
  std::vector<Vec> observations;
  std::vector<Vec> actions;
  std::vector<double> rewards;
  bool terminal = false;
  bool timeout = false;
  // The environment was reset right before this segment.
  bool starts_episode = false;

  std::size_t length() const { return rewards.size(); }
  bool episode_ended() const { return terminal || timeout; }
};

// Contiguous run of segments of one worker (one trajectory fragment).
struct Fragment {
  std::size_t worker = 0;
  std::size_t first = 0;  // index into IterationBatch::segments
  std::size_t last = 0;   // inclusive
};

struct IterationBatch {
  std::size_t workers = 0;
  std::size_t segments_per_worker = 0;
  // Worker-major: segments[i * H + j].
  std::vector<Segment> segments;
  // Raw observations of every state acted upon, in (worker, time) order.
  Mat raw_observations;
  std::uint64_t env_steps = 0;

  std::size_t transitions() const;
  const Segment& at(std::size_t worker, std::size_t j) const {
    return segments[worker * segments_per_worker + j];
  }
  // Splits each worker's stream at episode ends.
  std::vector<Fragment> fragments() const;
};

struct EsTrajectory {
  NoiseIndex noise;
  std::vector<double> rewards;
  // sum_k gamma^k r_k, accumulated front to back.
  double discounted_return = 0.0;
  bool terminal = false;
  bool timeout = false;
};

struct EsBatch {
  std::vector<EsTrajectory> trajectories;  // one per worker
  Mat raw_observations;
  std::uint64_t env_steps = 0;
};

struct SamplerConfig {
  int workers = 8;
  int segments_per_worker = 16;  // H
  int rollout_length = 10;       // N
  double sigma = 0.06;
  double gamma = 0.99;
  int threads = 1;
  std::uint64_t env_seed = 0;
  std::uint64_t noise_seed = 0;

  void validate() const;
};

class SamplerError : public std::runtime_error {
 public:
  SamplerError(std::size_t worker, const std::string& what)
      : std::runtime_error("worker " + std::to_string(worker) + ": " + what),
        worker_(worker) {}
  std::size_t worker() const { return worker_; }

 private:
  std::size_t worker_;
};

// Fork-join rollout collection. Worker i owns its environment and the reset
// stream derive(env_seed, ENV, i); the segment-j perturbation of iteration t
// comes from derive(noise_seed, NOIS, t, i, j). Results are merged in
// (worker, j) order, so the batch does not depend on the thread count.
//
// Environments persist across iterations: an episode cut by the iteration
// boundary continues in the next call.
class Sampler {
 public:
  struct WorkerState {
    Vec env_state;
    std::uint64_t stream_counter = 0;
    bool needs_reset = true;
    Vec raw_obs;
  };

  Sampler(EnvSpec env_spec, PolicySpec policy_spec, SamplerConfig config);

  IterationBatch collect(const ParamVector& theta, const ObsNormalizer& snapshot,
                         const NoiseTable& table, std::uint64_t iteration);
  // Episode-wise perturbation: every worker resets and runs one perturbed
  // trajectory for up to N * H steps.
  EsBatch collect_es(const ParamVector& theta, const ObsNormalizer& snapshot,
                     const NoiseTable& table, std::uint64_t iteration);

  // Fresh environments and reset streams, as right after construction.
  void reset_workers();
  std::vector<WorkerState> save() const;
  void load(const std::vector<WorkerState>& states);

  const SamplerConfig& config() const { return config_; }
  SamplerConfig& config() { return config_; }
  const Environment& env(std::size_t worker) const { return *workers_[worker].env; }

 private:
  struct Worker {
    std::unique_ptr<Environment> env;
    RngStream stream;
    bool needs_reset = true;
    Vec raw_obs;
  };

  EnvSpec env_spec_;
  PolicySpec policy_spec_;
  SamplerConfig config_;
  std::vector<Worker> workers_;

  template <typename Fn>
  void run_parallel(Fn&& fn);
};

struct EpisodeRecord {
  std::vector<Vec> observations;  // normalized, one per state acted upon
  std::vector<double> rewards;
  DoneReason end = DoneReason::running;

  double undiscounted_return() const;
  double discounted_return(double gamma) const;
};

// Noise-free episode with a fixed policy; runs until terminal or timeout.
EpisodeRecord run_episode(Environment& env, RngStream& reset_stream,
                          const CompiledPolicy& policy, const ObsNormalizer& normalizer);

}  // namespace zoac

#endif  // ZOAC_SAMPLER_SAMPLER_HPP_
