#include "zoac/envs/quadratic_bandit.hpp"

#include <algorithm>

namespace zoac {

QuadraticBandit::QuadraticBandit(int horizon, double action_bound)
    : horizon_(horizon), action_bound_(action_bound) {
  if (horizon_ < 1) throw std::invalid_argument("QuadraticBandit: horizon < 1");
  if (action_bound_ <= 0.0) throw std::invalid_argument("QuadraticBandit: bound <= 0");
}

EnvState QuadraticBandit::reset(RngStream& /*stream*/) {
  steps_ = 0;
  done_ = false;
  return {Vec::Ones(1), false, DoneReason::running};
}

StepResult QuadraticBandit::step(const Vec& action) {
  if (done_) throw EpisodeDoneError("QuadraticBandit::step after episode end");
  if (action.size() != 1) throw std::invalid_argument("QuadraticBandit: action dim != 1");
  const double a = std::clamp(action[0], -action_bound_, action_bound_);
  StepResult out;
  out.observation = Vec::Ones(1);
  out.reward = -a * a;
  ++steps_;
  if (steps_ >= horizon_) {
    out.done = true;
    out.reason = DoneReason::timeout;
  }
  done_ = out.done;
  return out;
}

Vec QuadraticBandit::save_state() const {
  return Vec{{static_cast<double>(steps_), done_ ? 1.0 : 0.0}};
}

void QuadraticBandit::load_state(const Vec& state) {
  if (state.size() != 2) throw std::invalid_argument("QuadraticBandit: bad state");
  steps_ = static_cast<int>(state[0]);
  done_ = state[1] != 0.0;
}

std::unique_ptr<Environment> QuadraticBandit::clone() const {
  return std::make_unique<QuadraticBandit>(*this);
}

}  // namespace zoac
