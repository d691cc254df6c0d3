#include "doctest.h"

#include <cmath>

#include "zoac/envs/env_spec.hpp"
#include "zoac/envs/lqr.hpp"
#include "zoac/envs/mountain_car.hpp"
#include "zoac/envs/quadratic_bandit.hpp"

using namespace zoac;

static Vec v1(double a) { return Vec::Constant(1, a); }

TEST_CASE("mountain car reset distribution") {
  MountainCar env;
  RngStream s(3);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EnvState st = env.reset(s);
    CHECK(st.observation[0] >= -0.6);
    CHECK(st.observation[0] <= -0.4);
    CHECK(st.observation[1] == 0.0);
    sum += st.observation[0];
  }
  CHECK(std::abs(sum / 10000 + 0.5) < 0.005);
}

TEST_CASE("mountain car single step from the valley") {
  MountainCar env;
  env.set_state(-0.5, 0.0);
  const StepResult r = env.step(v1(0.0));
  const double v = -0.0025 * std::cos(3.0 * -0.5);
  CHECK(r.observation[1] == doctest::Approx(v).epsilon(1e-15));
  CHECK(r.observation[1] == doctest::Approx(-1.7684e-4).epsilon(1e-4));
  CHECK(r.observation[0] == doctest::Approx(-0.5 + v).epsilon(1e-15));
  CHECK(r.observation[0] == doctest::Approx(-0.50018).epsilon(1e-5));
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
}

TEST_CASE("mountain car action clipping and penalty") {
  MountainCar env(999, 0.1);
  env.set_state(-0.5, 0.0);
  const StepResult r = env.step(v1(5.0));
  CHECK(r.reward == doctest::Approx(-0.1));
  CHECK(r.observation[1] == doctest::Approx(0.0015 - 0.0025 * std::cos(-1.5)).epsilon(1e-14));
}

TEST_CASE("mountain car goal is terminal with bonus") {
  MountainCar env;
  env.set_state(0.449, 0.05);
  const StepResult r = env.step(v1(1.0));
  CHECK(r.done);
  CHECK(r.reason == DoneReason::terminal);
  CHECK(r.reward == doctest::Approx(100.0 - 0.1));
  CHECK_THROWS_AS(env.step(v1(0.0)), EpisodeDoneError);
}

TEST_CASE("mountain car timeout and left wall") {
  MountainCar env(5);
  env.set_state(-1.19, -0.05);
  StepResult r = env.step(v1(-1.0));
  CHECK(r.observation[0] == -1.2);
  CHECK(r.observation[1] == 0.0);
  for (int i = 1; i < 5; ++i) {
    CHECK_FALSE(r.done);
    r = env.step(v1(0.0));
  }
  CHECK(r.done);
  CHECK(r.reason == DoneReason::timeout);
}

TEST_CASE("mountain car state round trip") {
  MountainCar a;
  RngStream s(8);
  a.reset(s);
  for (int i = 0; i < 10; ++i) a.step(v1(0.3));
  MountainCar b;
  b.load_state(a.save_state());
  for (int i = 0; i < 20; ++i) {
    const auto ra = a.step(v1(-0.7));
    const auto rb = b.step(v1(-0.7));
    CHECK(ra.observation == rb.observation);
    CHECK(ra.reward == rb.reward);
  }
}

TEST_CASE("lqr origin is a fixed point with zero reward") {
  LqrSpec spec = default_lqr_spec();
  spec.init_std = 0.0;
  LqrEnv env(spec);
  RngStream s(1);
  const EnvState st = env.reset(s);
  CHECK(st.observation.isZero());
  const StepResult r = env.step(Vec::Zero(1));
  CHECK(r.reward == 0.0);
  CHECK(r.observation.isZero());
}

TEST_CASE("lqr reward at the pre-step state and horizon timeout") {
  LqrSpec spec = default_lqr_spec();
  spec.horizon = 3;
  LqrEnv env(spec);
  Vec x(2);
  x << 1.0, -2.0;
  env.set_state(x);
  const StepResult r = env.step(v1(0.5));
  CHECK(r.reward == doctest::Approx(-(1.0 + 4.0 + 0.1 * 0.25)));
  Vec expect = spec.A * x + spec.B * v1(0.5);
  CHECK((r.observation - expect).norm() < 1e-15);
  env.step(v1(0.0));
  const StepResult last = env.step(v1(0.0));
  CHECK(last.done);
  CHECK(last.reason == DoneReason::timeout);
}

TEST_CASE("lqr reward bound covers the clip box") {
  LqrSpec spec = default_lqr_spec();
  LqrEnv env(spec);
  Vec x = Vec::Constant(2, spec.state_clip);
  env.set_state(x);
  const StepResult r = env.step(v1(1e6));
  CHECK(std::abs(r.reward) <= env.reward_bound());
  CHECK(r.observation.cwiseAbs().maxCoeff() <= spec.state_clip);
}

// Deterministic dynamics: every return is -P x0^2 up to the truncated tail,
// so the ratio of summed returns to summed x0^2 estimates P.
TEST_CASE("lqr value oracle matches Monte Carlo rollouts on a scalar system") {
  LqrSpec spec;
  spec.A = Mat::Constant(1, 1, 0.95);
  spec.B = Mat::Constant(1, 1, 0.5);
  spec.Q = Mat::Constant(1, 1, 1.0);
  spec.R = Mat::Constant(1, 1, 0.2);
  spec.gamma = 0.99;
  spec.horizon = 1000;
  spec.init_mean = Vec::Zero(1);
  spec.init_std = 1.0;
  spec.state_clip = 1e6;
  spec.action_clip = 1e6;
  const Mat gain = Mat::Constant(1, 1, -0.4);
  const double P = lqr_value_oracle(spec, gain)(0, 0);
  const double acl = 0.95 - 0.5 * 0.4;
  CHECK(P == doctest::Approx((1.0 + 0.2 * 0.16) / (1.0 - 0.99 * acl * acl)).epsilon(1e-9));

  LqrEnv env(spec);
  RngStream s(11);
  double ret_sum = 0.0, x2_sum = 0.0;
  for (int ep = 0; ep < 1000; ++ep) {
    EnvState st = env.reset(s);
    x2_sum += st.observation.squaredNorm();
    double disc = 1.0;
    Vec obs = st.observation;
    for (int t = 0; t < 1000; ++t) {
      const StepResult r = env.step(gain * obs);
      ret_sum += disc * r.reward;
      disc *= spec.gamma;
      obs = r.observation;
    }
  }
  CHECK(-ret_sum / x2_sum == doctest::Approx(P).epsilon(0.01));
}

TEST_CASE("lqr value oracle rejects an unstable closed loop") {
  LqrSpec spec = default_lqr_spec();
  Mat gain(1, 2);
  gain << 0.0, 1.0;
  CHECK_THROWS_AS(lqr_value_oracle(spec, gain), DivergenceError);
}

TEST_CASE("quadratic bandit") {
  QuadraticBandit env(2, 3.0);
  RngStream s(0);
  const EnvState st = env.reset(s);
  CHECK(st.observation.size() == 1);
  CHECK(st.observation[0] == 1.0);
  StepResult r = env.step(v1(1.5));
  CHECK(r.reward == -2.25);
  CHECK_FALSE(r.done);
  r = env.step(v1(-7.0));
  CHECK(r.reward == -9.0);
  CHECK(r.done);
  CHECK(r.reason == DoneReason::timeout);
  CHECK(env.reward_bound() == 9.0);
}

TEST_CASE("env spec parsing and factory") {
  CHECK(parse_env_kind("lqr") == EnvKind::lqr);
  CHECK(to_string(EnvKind::mountain_car) == "mountain_car");
  CHECK_THROWS_AS(parse_env_kind("cartpole"), std::invalid_argument);
  EnvSpec spec;
  spec.kind = EnvKind::quadratic_bandit;
  auto env = make_env(spec);
  CHECK(env->name() == "quadratic_bandit");
  auto copy = env->clone();
  CHECK(copy->obs_dim() == 1);
}
