#ifndef ZOAC_ENVS_LQR_HPP_
#define ZOAC_ENVS_LQR_HPP_

#include <stdexcept>

#include "zoac/envs/env.hpp"

namespace zoac {

struct LqrSpec {
  Mat A;
  Mat B;
  Mat Q;
  Mat R;
  double gamma = 0.99;
  int horizon = 200;
  // Reset draws init_mean + init_std * N(0, I), then clips.
  Vec init_mean;
  double init_std = 1.0;
  // Box bounds that keep rewards bounded.
  double state_clip = 10.0;
  double action_clip = 10.0;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int action_dim() const { return static_cast<int>(B.cols()); }
  // Throws std::invalid_argument on shape or definiteness violations.
  void validate() const;
};

// x <- clip(A x + B a); reward -(x^T Q x + a^T R a) at the pre-step state,
// with a clipped to the action box. Episodes time out at the horizon.
class LqrEnv final : public Environment {
 public:
  explicit LqrEnv(LqrSpec spec);

  std::string name() const override { return "lqr"; }
  int obs_dim() const override { return spec_.state_dim(); }
  int act_dim() const override { return spec_.action_dim(); }
  // max over the clipping box of x'Qx + a'Ra (coarse absolute-sum bound).
  double reward_bound() const override;

  EnvState reset(RngStream& stream) override;
  StepResult step(const Vec& action) override;

  void set_state(const Vec& x);
  const Vec& state() const { return x_; }
  const LqrSpec& spec() const { return spec_; }

  Vec save_state() const override;
  void load_state(const Vec& state) override;
  std::unique_ptr<Environment> clone() const override;

 private:
  LqrSpec spec_;
  Vec x_;
  int steps_ = 0;
  bool done_ = true;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P of the discounted policy-evaluation Lyapunov equation
//   P = Q + G'RG + gamma (A + BG)' P (A + BG)
// for the linear policy a = G x, so that V(x) = -x'Px. Solved by fixed-point
// iteration; throws DivergenceError when the iteration does not contract.
Mat lqr_value_oracle(const LqrSpec& spec, const Mat& gain, double tol = 1e-10,
                     int max_iter = 1000000);

}  // namespace zoac

#endif  // ZOAC_ENVS_LQR_HPP_
