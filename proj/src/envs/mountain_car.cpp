#include "zoac/envs/mountain_car.hpp"

#include <algorithm>
#include <cmath>

namespace zoac {

std::string to_string(DoneReason r) {
  switch (r) {
    case DoneReason::terminal:
      return "terminal";
    case DoneReason::timeout:
      return "timeout";
    case DoneReason::running:
      break;
  }
  return "running";
}

MountainCar::MountainCar(int max_steps, double action_penalty)
    : max_steps_(max_steps), action_penalty_(action_penalty) {
  if (max_steps_ < 1) throw std::invalid_argument("MountainCar: max_steps < 1");
  if (action_penalty_ < 0.0) {
    throw std::invalid_argument("MountainCar: negative action penalty");
  }
}

Vec MountainCar::observation() const { return Vec{{position_, velocity_}}; }

EnvState MountainCar::reset(RngStream& stream) {
  position_ = stream.uniform(-0.6, -0.4);
  velocity_ = 0.0;
  steps_ = 0;
  done_ = false;
  return {observation(), false, DoneReason::running};
}

void MountainCar::set_state(double position, double velocity) {
  position_ = position;
  velocity_ = velocity;
  steps_ = 0;
  done_ = false;
}

StepResult MountainCar::step(const Vec& action) {
  if (done_) throw EpisodeDoneError("MountainCar::step after episode end");
  if (action.size() != 1) throw std::invalid_argument("MountainCar: action dim != 1");
  const double force = std::clamp(action[0], -1.0, 1.0);

  velocity_ += force * kPower - kGravity * std::cos(3.0 * position_);
  velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
  position_ += velocity_;
  position_ = std::clamp(position_, kMinPosition, kMaxPosition);
  if (position_ == kMinPosition && velocity_ < 0.0) velocity_ = 0.0;
  ++steps_;

  StepResult out;
  out.reward = -action_penalty_ * force * force;
  if (position_ >= kGoalPosition) {
    out.reward += kGoalReward;
    out.done = true;
    out.reason = DoneReason::terminal;
  } else if (steps_ >= max_steps_) {
    out.done = true;
    out.reason = DoneReason::timeout;
  }
  done_ = out.done;
  out.observation = observation();
  return out;
}

Vec MountainCar::save_state() const {
  return Vec{{position_, velocity_, static_cast<double>(steps_), done_ ? 1.0 : 0.0}};
}

void MountainCar::load_state(const Vec& state) {
  if (state.size() != 4) throw std::invalid_argument("MountainCar: bad state");
  position_ = state[0];
  velocity_ = state[1];
  steps_ = static_cast<int>(state[2]);
  done_ = state[3] != 0.0;
}

std::unique_ptr<Environment> MountainCar::clone() const {
  return std::make_unique<MountainCar>(*this);
}

}  // namespace zoac
