#include "zoac/envs/lqr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace zoac {

void LqrSpec::validate() const {
  const auto n = A.rows();
  if (n < 1 || A.cols() != n) throw std::invalid_argument("LqrSpec: A must be square");
  if (B.rows() != n || B.cols() < 1) throw std::invalid_argument("LqrSpec: B shape");
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("LqrSpec: Q shape");
  if (R.rows() != B.cols() || R.cols() != B.cols()) {
    throw std::invalid_argument("LqrSpec: R shape");
  }
  if (init_mean.size() != n) throw std::invalid_argument("LqrSpec: init_mean shape");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("LqrSpec: gamma");
  if (horizon < 1) throw std::invalid_argument("LqrSpec: horizon < 1");
  if (init_std < 0.0 || state_clip <= 0.0 || action_clip <= 0.0) {
    throw std::invalid_argument("LqrSpec: negative scale");
  }
  const Eigen::SelfAdjointEigenSolver<Mat> qe(0.5 * (Q + Q.transpose()));
  if (qe.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("LqrSpec: Q must be positive semidefinite");
  }
  const Eigen::SelfAdjointEigenSolver<Mat> re(0.5 * (R + R.transpose()));
  if (re.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("LqrSpec: R must be positive definite");
  }
}

LqrEnv::LqrEnv(LqrSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  x_ = spec_.init_mean;
}

double LqrEnv::reward_bound() const {
  const double xs = spec_.state_clip * spec_.state_clip;
  const double as = spec_.action_clip * spec_.action_clip;
  return spec_.Q.cwiseAbs().sum() * xs + spec_.R.cwiseAbs().sum() * as;
}

EnvState LqrEnv::reset(RngStream& stream) {
  x_ = spec_.init_mean;
  if (spec_.init_std > 0.0) {
    x_ += spec_.init_std * stream.gaussian(x_.size());
  }
  x_ = x_.cwiseMax(-spec_.state_clip).cwiseMin(spec_.state_clip);
  steps_ = 0;
  done_ = false;
  return {x_, false, DoneReason::running};
}

void LqrEnv::set_state(const Vec& x) {
  if (x.size() != spec_.state_dim()) throw std::invalid_argument("LqrEnv: state dim");
  x_ = x;
  steps_ = 0;
  done_ = false;
}

StepResult LqrEnv::step(const Vec& action) {
  if (done_) throw EpisodeDoneError("LqrEnv::step after episode end");
  if (action.size() != spec_.action_dim()) {
    throw std::invalid_argument("LqrEnv: action dim mismatch");
  }
  const Vec a = action.cwiseMax(-spec_.action_clip).cwiseMin(spec_.action_clip);
  StepResult out;
  out.reward = -(x_.dot(spec_.Q * x_) + a.dot(spec_.R * a));
  x_ = (spec_.A * x_ + spec_.B * a).cwiseMax(-spec_.state_clip).cwiseMin(spec_.state_clip);
  ++steps_;
  if (steps_ >= spec_.horizon) {
    out.done = true;
    out.reason = DoneReason::timeout;
  }
  done_ = out.done;
  out.observation = x_;
  return out;
}

Vec LqrEnv::save_state() const {
  Vec s(x_.size() + 2);
  s.head(x_.size()) = x_;
  s[x_.size()] = steps_;
  s[x_.size() + 1] = done_ ? 1.0 : 0.0;
  return s;
}

void LqrEnv::load_state(const Vec& state) {
  const auto n = spec_.state_dim();
  if (state.size() != n + 2) throw std::invalid_argument("LqrEnv: bad state");
  x_ = state.head(n);
  steps_ = static_cast<int>(state[n]);
  done_ = state[n + 1] != 0.0;
}

std::unique_ptr<Environment> LqrEnv::clone() const {
  return std::make_unique<LqrEnv>(*this);
}

Mat lqr_value_oracle(const LqrSpec& spec, const Mat& gain, double tol, int max_iter) {
  spec.validate();
  if (gain.rows() != spec.action_dim() || gain.cols() != spec.state_dim()) {
    throw std::invalid_argument("lqr_value_oracle: gain shape mismatch");
  }
  const Mat closed = spec.A + spec.B * gain;
  const Mat stage = spec.Q + gain.transpose() * spec.R * gain;
  // Contraction of P -> stage + gamma Acl' P Acl needs gamma rho(Acl)^2 < 1.
  const Eigen::EigenSolver<Mat> es(closed);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (spec.gamma * rho * rho >= 1.0) {
    throw DivergenceError("lqr_value_oracle: closed loop is not gamma-stable");
  }
  Mat p = stage;
  for (int it = 0; it < max_iter; ++it) {
    Mat next = stage + spec.gamma * closed.transpose() * p * closed;
    next = 0.5 * (next + next.transpose());
    const double diff = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (!p.allFinite()) break;
    if (diff <= tol * std::max(1.0, p.cwiseAbs().maxCoeff())) return p;
  }
  throw DivergenceError("lqr_value_oracle: fixed-point iteration did not converge");
}

}  // namespace zoac
