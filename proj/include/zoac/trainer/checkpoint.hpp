#ifndef ZOAC_TRAINER_CHECKPOINT_HPP_
#define ZOAC_TRAINER_CHECKPOINT_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoac/numkit/adam.hpp"
#include "zoac/numkit/running_stat.hpp"
#include "zoac/sampler/sampler.hpp"
#include "zoac/trainer/config.hpp"

namespace zoac {

inline constexpr std::uint32_t kCheckpointSchemaVersion = 1;

// Everything needed to continue a run bit-exactly.
struct TrainerState {
  TrainerConfig config;
  std::uint64_t iteration = 0;  // iterations completed
  std::uint64_t env_steps = 0;
  ParamVector theta;
  AdamState actor_adam;
  // Empty when the run has no learned critic.
  Vec critic_params;
  AdamState critic_adam;
  RunningStat obs_stat;
  std::vector<Sampler::WorkerState> workers;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File layout, all integers little-endian:
//
//   "ZOACCKPT"                 8 bytes
//   schema version             u32
//   header length              u64, then that many bytes of UTF-8 JSON
//   array count                u64
//   per array: length          u64, then length x f64
//   FNV-1a 64 checksum         u64 over every preceding byte
//
// Array order: actor theta, actor Adam m, actor Adam v, critic params,
// critic Adam m, critic Adam v, normalizer mean, normalizer m2, then for each
// worker its environment state and its last raw observation.
std::vector<std::uint8_t> encode_checkpoint(const TrainerState& state);
TrainerState decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const TrainerState& state, const std::string& path);
TrainerState load_checkpoint(const std::string& path);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

// <out_dir>/checkpoints/ckpt_<iteration, 6 digits>.bin
std::string checkpoint_path(const std::string& out_dir, std::uint64_t iteration);

}  // namespace zoac

#endif  // ZOAC_TRAINER_CHECKPOINT_HPP_
