#ifndef ZOAC_ENVS_MOUNTAIN_CAR_HPP_
#define ZOAC_ENVS_MOUNTAIN_CAR_HPP_

#include "zoac/envs/env.hpp"

namespace zoac {

// Continuous mountain car with the classic-control constants. The goal pays
// +100 and every step costs action_penalty * a^2; actions are clipped to
// [-1, 1] before the dynamics.
class MountainCar final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kPower = 0.0015;
  static constexpr double kGravity = 0.0025;
  static constexpr double kGoalReward = 100.0;

  explicit MountainCar(int max_steps = 999, double action_penalty = 0.1);

  std::string name() const override { return "mountain_car"; }
  int obs_dim() const override { return 2; }
  int act_dim() const override { return 1; }
  double reward_bound() const override { return kGoalReward + action_penalty_; }

  EnvState reset(RngStream& stream) override;
  StepResult step(const Vec& action) override;

  // Places the car at an arbitrary state (tests).
  void set_state(double position, double velocity);
  double position() const { return position_; }
  double velocity() const { return velocity_; }

  Vec save_state() const override;
  void load_state(const Vec& state) override;
  std::unique_ptr<Environment> clone() const override;

 private:
  int max_steps_;
  double action_penalty_;
  double position_ = -0.5;
  double velocity_ = 0.0;
  int steps_ = 0;
  bool done_ = true;

  Vec observation() const;
};

}  // namespace zoac

#endif  // ZOAC_ENVS_MOUNTAIN_CAR_HPP_
