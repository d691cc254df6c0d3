#ifndef ZOAC_ENVS_ENV_HPP_
#define ZOAC_ENVS_ENV_HPP_

#include <memory>
#include <stdexcept>
#include <string>

#include "zoac/numkit/rng.hpp"
#include "zoac/types.hpp"

namespace zoac {

enum class DoneReason { running, terminal, timeout };

std::string to_string(DoneReason r);

struct EnvState {
  Vec observation;
  bool done = false;
  DoneReason reason = DoneReason::running;
};

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool done = false;
  DoneReason reason = DoneReason::running;
};

// Stepping an environment whose episode already ended.
class EpisodeDoneError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  // Declared bound: |r| <= reward_bound() for every reachable transition.
  virtual double reward_bound() const = 0;

  virtual EnvState reset(RngStream& stream) = 0;
  virtual StepResult step(const Vec& action) = 0;

  // Full internal state as doubles, for checkpoints. Restoring it makes the
  // next step() bitwise identical to the uninterrupted run.
  virtual Vec save_state() const = 0;
  virtual void load_state(const Vec& state) = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace zoac

#endif  // ZOAC_ENVS_ENV_HPP_
