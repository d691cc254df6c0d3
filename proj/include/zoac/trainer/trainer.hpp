#ifndef ZOAC_TRAINER_TRAINER_HPP_
#define ZOAC_TRAINER_TRAINER_HPP_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zoac/analysis/value_gap.hpp"
#include "zoac/evaluation/critic.hpp"
#include "zoac/noise/noise_table.hpp"
#include "zoac/sampler/sampler.hpp"
#include "zoac/trainer/checkpoint.hpp"
#include "zoac/trainer/config.hpp"
#include "zoac/trainer/metrics.hpp"

namespace zoac {

inline constexpr std::uint64_t kInitStreamTag = 0x494E4954;     // "INIT"
inline constexpr std::uint64_t kShuffleStreamTag = 0x53485546;  // "SHUF"

struct EvalResult {
  std::vector<double> returns;             // undiscounted
  std::vector<double> discounted_returns;
  std::vector<EpisodeRecord> episodes;

  double mean_return() const;
};

// Noise-free rollouts of the deterministic policy. Episode e resets from
// derive(seed, EVAL, e), so repeated calls agree exactly.
EvalResult evaluate_policy(const PolicySpec& spec, const ParamVector& theta, const EnvSpec& env,
                           const ObsNormalizer& normalizer, std::size_t episodes, double gamma,
                           std::uint64_t seed);

// Seeds of the independent streams of a run, all derived from the master seed.
struct RunSeeds {
  std::uint64_t env = 0;
  std::uint64_t noise_index = 0;
  std::uint64_t eval = 0;

  static RunSeeds from_master(std::uint64_t master);
};

// One run of the main loop. Per iteration: collect with a frozen normalizer
// snapshot, update the normalizer, compute advantages and value targets with
// the critic as it stood at the start of the iteration, fit the critic, then
// take the actor step.
class Trainer {
 public:
  explicit Trainer(TrainerConfig config);
  explicit Trainer(const TrainerState& state);

  MetricsRecord step();
  EvalResult evaluate() const;
  bool eval_due(std::uint64_t completed) const;

  TrainerState state() const;
  const TrainerConfig& config() const { return config_; }
  const ParamVector& theta() const { return theta_; }
  std::uint64_t iteration() const { return iteration_; }
  std::uint64_t env_steps() const { return env_steps_; }
  const NoiseTable& table() const { return table_; }
  const ObsNormalizer& normalizer() const { return normalizer_; }
  // Null when the run has no learned critic.
  const CriticNet* critic() const { return has_critic() ? &critic_ : nullptr; }

 private:
  TrainerConfig config_;
  RunSeeds seeds_;
  NoiseTable table_;
  Sampler sampler_;
  ParamVector theta_;
  AdamState actor_adam_;
  CriticNet critic_;
  ObsNormalizer normalizer_;
  std::uint64_t iteration_ = 0;
  std::uint64_t env_steps_ = 0;
  std::chrono::steady_clock::time_point start_;

  bool has_critic() const;
  Vec zoac_direction(MetricsRecord& rec);
  Vec es_direction(MetricsRecord& rec);
};

struct TrainSummary {
  std::uint64_t iterations = 0;
  std::optional<double> final_eval_return;
  std::string final_checkpoint;
};

// Runs to config.iterations, writing <out_dir>/metrics.jsonl, <out_dir>/config.ini
// and iteration-stamped checkpoints. With `resume`, the run continues from the
// checkpoint (whose config wins except for out_dir, threads, iterations and the
// eval/checkpoint cadence) and the metrics file is cut back to its iteration.
TrainSummary run_training(const TrainerConfig& config, const std::optional<std::string>& resume,
                          std::ostream* log);

}  // namespace zoac

#endif  // ZOAC_TRAINER_TRAINER_HPP_
