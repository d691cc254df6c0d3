#ifndef ZOAC_EVALUATION_CRITIC_HPP_
#define ZOAC_EVALUATION_CRITIC_HPP_

#include <functional>
#include <vector>

#include "zoac/numkit/adam.hpp"
#include "zoac/numkit/mlp.hpp"
#include "zoac/numkit/rng.hpp"

namespace zoac {

// State-value estimate on (normalized) observations.
class StateValue {
 public:
  virtual ~StateValue() = default;
  // Columns of obs are states.
  virtual Vec values(const Mat& obs) const = 0;
  double value(const Vec& obs) const { return values(obs)[0]; }
};

class ZeroValue final : public StateValue {
 public:
  Vec values(const Mat& obs) const override { return Vec::Zero(obs.cols()); }
};

class ConstantValue final : public StateValue {
 public:
  explicit ConstantValue(double c) : c_(c) {}
  Vec values(const Mat& obs) const override { return Vec::Constant(obs.cols(), c_); }

 private:
  double c_;
};

// Wraps an analytic value function, e.g. the LQR oracle -x'Px.
class FunctionValue final : public StateValue {
 public:
  explicit FunctionValue(std::function<double(const Vec&)> fn) : fn_(std::move(fn)) {}
  Vec values(const Mat& obs) const override;

 private:
  std::function<double(const Vec&)> fn_;
};

struct CriticConfig {
  std::vector<int> hidden{256, 256};
  double lr = 3e-4;
  double gamma = 0.99;
  double lambda = 0.95;
};

// Scalar tanh MLP V_w with its own Adam state.
class CriticNet final : public StateValue {
 public:
  CriticNet() = default;
  CriticNet(int obs_dim, const CriticConfig& config, RngStream& init_stream);
  CriticNet(Mlp mlp, AdamState adam, double gamma, double lambda);

  Vec values(const Mat& obs) const override;

  const Mlp& mlp() const { return mlp_; }
  Mlp& mlp() { return mlp_; }
  const AdamState& adam() const { return adam_; }
  AdamState& adam() { return adam_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }

 private:
  Mlp mlp_;
  AdamState adam_;
  double gamma_ = 0.99;
  double lambda_ = 0.95;
};

}  // namespace zoac

#endif  // ZOAC_EVALUATION_CRITIC_HPP_
