#ifndef ZOAC_TRAINER_CONFIG_HPP_
#define ZOAC_TRAINER_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zoac/envs/env_spec.hpp"
#include "zoac/policies/policy.hpp"

namespace zoac {

enum class Algo { zoac, es };
enum class CriticKind { mlp, none };

// Defaults follow the HalfCheetah-class column of the reference
// hyperparameters (linear policy).
struct TrainerConfig {
  // [run]
  Algo algo = Algo::zoac;
  std::uint64_t seed = 0;
  int iterations = 100;
  int eval_interval = 10;
  int eval_episodes = 10;
  int checkpoint_interval = 0;  // 0: initial and final checkpoints only
  int threads = 1;
  std::string out_dir = "runs/default";
  bool record_wall_time = true;

  // [env]
  EnvSpec env;

  // [policy]
  PolicySpec policy;

  // [sampler]
  int workers = 8;              // n
  int rollout_length = 10;      // N
  int train_frequency = 16;     // H
  double sigma = 0.06;
  std::size_t table_size = 25'000'000;
  std::uint64_t noise_seed = 0;

  // [critic]
  CriticKind critic = CriticKind::mlp;
  std::vector<int> critic_hidden{256, 256};
  double critic_lr = 3e-4;
  int batch_size = 64;  // L
  int epochs = 8;       // M
  double gamma = 0.99;
  double lambda = 0.95;

  // [actor]
  double actor_lr = 0.005;
  int sift = 0;  // 0 disables top-direction sifting
  double beta_start = 1.0;
  double beta_end = 0.5;
  bool normalize_advantages = true;
  bool obs_norm = true;

  // [es]
  bool es_shaped = true;

  // Fills policy dims from the environment and checks every field. Throws
  // std::invalid_argument naming the first bad field.
  void finalize();
};

Algo parse_algo(const std::string& s);
std::string to_string(Algo a);

// One configuration key: lives in `section` of the file and is also a CLI
// flag --<key>.
struct ConfigField {
  std::string section;
  std::string key;
  std::string help;
  std::function<void(TrainerConfig&, const std::string&)> set;
  std::function<std::string(const TrainerConfig&)> get;
};

const std::vector<ConfigField>& config_fields();

// Reads an INI document ([section] / key = value). Unknown keys are errors.
TrainerConfig load_config_file(const std::string& path);
TrainerConfig parse_config_string(const std::string& text);
void apply_config_value(TrainerConfig& cfg, const std::string& key, const std::string& value);
std::map<std::string, std::string> config_to_map(const TrainerConfig& cfg);
TrainerConfig config_from_map(const std::map<std::string, std::string>& values);
std::string config_to_ini(const TrainerConfig& cfg);

}  // namespace zoac

#endif  // ZOAC_TRAINER_CONFIG_HPP_
