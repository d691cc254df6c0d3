#include "zoac/numkit/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace zoac {

AdamState AdamState::zeros(Eigen::Index size, double lr) {
  AdamState s;
  s.m = Vec::Zero(size);
  s.v = Vec::Zero(size);
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, Vec& params, const Vec& grad) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: length mismatch");
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace zoac
