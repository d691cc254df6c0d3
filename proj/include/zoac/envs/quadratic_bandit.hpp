#ifndef ZOAC_ENVS_QUADRATIC_BANDIT_HPP_
#define ZOAC_ENVS_QUADRATIC_BANDIT_HPP_

#include "zoac/envs/env.hpp"

namespace zoac {

// Constant observation (1), reward -clip(a)^2. With a linear identity-output
// policy a = theta, the Gaussian-smoothed gradient is exactly -2 theta.
class QuadraticBandit final : public Environment {
 public:
  explicit QuadraticBandit(int horizon = 1000, double action_bound = 10.0);

  std::string name() const override { return "quadratic_bandit"; }
  int obs_dim() const override { return 1; }
  int act_dim() const override { return 1; }
  double reward_bound() const override { return action_bound_ * action_bound_; }

  EnvState reset(RngStream& stream) override;
  StepResult step(const Vec& action) override;

  Vec save_state() const override;
  void load_state(const Vec& state) override;
  std::unique_ptr<Environment> clone() const override;

 private:
  int horizon_;
  double action_bound_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace zoac

#endif  // ZOAC_ENVS_QUADRATIC_BANDIT_HPP_
