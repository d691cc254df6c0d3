#include "doctest.h"

#include "zoac/sampler/sampler.hpp"

using namespace zoac;

namespace {

PolicySpec linear_policy(int obs, int act, OutputSquash out = OutputSquash::identity) {
  PolicySpec p;
  p.kind = PolicyKind::linear;
  p.obs_dim = obs;
  p.act_dim = act;
  p.output = out;
  return p;
}

EnvSpec lqr_env() {
  EnvSpec e;
  e.kind = EnvKind::lqr;
  return e;
}

SamplerConfig table1(int threads = 1) {
  SamplerConfig c;
  c.workers = 8;
  c.segments_per_worker = 16;
  c.rollout_length = 10;
  c.sigma = 0.05;
  c.threads = threads;
  c.env_seed = 10;
  c.noise_seed = 20;
  return c;
}

bool same_batch(const IterationBatch& a, const IterationBatch& b) {
  if (a.segments.size() != b.segments.size() || a.env_steps != b.env_steps) return false;
  if (a.raw_observations != b.raw_observations) return false;
  for (std::size_t s = 0; s < a.segments.size(); ++s) {
    const auto& x = a.segments[s];
    const auto& y = b.segments[s];
    if (x.noise != y.noise || x.rewards != y.rewards || x.terminal != y.terminal ||
        x.timeout != y.timeout || x.starts_episode != y.starts_episode ||
        x.observations != y.observations || x.actions != y.actions) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("full iteration without episode ends has n*H*N transitions") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, policy.param_count());
  Sampler s(lqr_env(), policy, table1());
  ObsNormalizer norm{RunningStat(2), false};
  const IterationBatch b = s.collect(ParamVector::Zero(2), norm, table, 0);
  CHECK(b.segments.size() == 128);
  CHECK(b.transitions() == 1280);
  CHECK(b.env_steps == 1280);
  CHECK(b.raw_observations.rows() == 1280);
  for (const auto& seg : b.segments) {
    CHECK(seg.length() == 10);
    CHECK(seg.observations.size() == 11);
    CHECK(seg.actions.size() == 10);
  }
  CHECK(b.fragments().size() == 8);
}

TEST_CASE("segment cut short by an episode end") {
  EnvSpec env;
  env.kind = EnvKind::quadratic_bandit;
  env.bandit_horizon = 3;
  const auto policy = linear_policy(1, 1);
  const auto table = NoiseTable::create(1, 1000, 1);
  SamplerConfig c = table1();
  c.workers = 2;
  c.segments_per_worker = 4;
  Sampler s(env, policy, c);
  ObsNormalizer norm{RunningStat(1), false};
  const IterationBatch b = s.collect(ParamVector::Zero(1), norm, table, 0);
  for (std::size_t w = 0; w < 2; ++w) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Segment& seg = b.at(w, j);
      CHECK(seg.length() == 3);
      CHECK(seg.timeout);
      CHECK_FALSE(seg.terminal);
      CHECK(seg.starts_episode);
    }
  }
  CHECK(b.transitions() == 2 * 4 * 3);
  // Every segment is its own fragment.
  CHECK(b.fragments().size() == 8);
}

TEST_CASE("segments draw distinct noise and are reproducible") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  Sampler a(lqr_env(), policy, table1());
  Sampler b(lqr_env(), policy, table1());
  ObsNormalizer norm{RunningStat(2), false};
  const auto ba = a.collect(ParamVector::Zero(2), norm, table, 3);
  const auto bb = b.collect(ParamVector::Zero(2), norm, table, 3);
  CHECK(same_batch(ba, bb));
  CHECK(ba.at(0, 0).noise != ba.at(0, 1).noise);
  CHECK(ba.at(0, 0).noise != ba.at(1, 0).noise);
}

TEST_CASE("batch does not depend on the thread count") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  Sampler one(lqr_env(), policy, table1(1));
  Sampler four(lqr_env(), policy, table1(4));
  ObsNormalizer norm{RunningStat(2), false};
  ParamVector theta(2);
  theta << -0.1, -0.3;
  for (std::uint64_t it = 0; it < 3; ++it) {
    CHECK(same_batch(one.collect(theta, norm, table, it), four.collect(theta, norm, table, it)));
  }
}

TEST_CASE("episodes continue across iterations and survive save/load") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  SamplerConfig c = table1();
  c.segments_per_worker = 3;  // 30 steps per iteration, horizon 200
  Sampler a(lqr_env(), policy, c);
  ObsNormalizer norm{RunningStat(2), false};
  const ParamVector theta = ParamVector::Zero(2);
  const auto first = a.collect(theta, norm, table, 0);
  CHECK(first.at(0, 0).starts_episode);
  const auto saved = a.save();
  const auto second = a.collect(theta, norm, table, 1);
  CHECK_FALSE(second.at(0, 0).starts_episode);
  // Continuation: the first state of iteration 1 is the bootstrap state of iteration 0.
  CHECK(second.at(0, 0).observations.front() == first.at(0, 2).observations.back());
  CHECK(second.fragments().size() == 8);

  Sampler b(lqr_env(), policy, c);
  b.load(saved);
  CHECK(same_batch(b.collect(theta, norm, table, 1), second));
}

TEST_CASE("observations are normalized with the snapshot") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  SamplerConfig c = table1();
  c.workers = 1;
  c.segments_per_worker = 1;
  Sampler s(lqr_env(), policy, c);
  // count 10, mean 1, m2 40: population std 2
  ObsNormalizer norm{RunningStat(10, Vec::Constant(2, 1.0), Vec::Constant(2, 40.0)), true};
  const auto b = s.collect(ParamVector::Zero(2), norm, table, 0);
  const Vec raw = b.raw_observations.row(0).transpose();
  CHECK((b.at(0, 0).observations[0] - (raw.array() - 1.0).matrix() / 2.0).norm() < 1e-15);
}

TEST_CASE("es collection: budget parity and zero noise") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  Sampler s(lqr_env(), policy, table1());
  ObsNormalizer norm{RunningStat(2), false};
  const EsBatch b = s.collect_es(ParamVector::Zero(2), norm, table, 0);
  CHECK(b.trajectories.size() == 8);
  CHECK(b.env_steps == 1280);
  for (const auto& t : b.trajectories) CHECK(t.rewards.size() == 160);

  SamplerConfig c = table1();
  c.sigma = 0.0;
  c.env_seed = 5;
  // Workers reset from different streams, so pin the initial state.
  EnvSpec env = lqr_env();
  env.lqr.init_std = 0.0;
  env.lqr.init_mean = Vec::Constant(2, 1.0);
  Sampler zz(env, policy, c);
  const EsBatch e = zz.collect_es(ParamVector::Zero(2), norm, table, 0);
  for (const auto& t : e.trajectories) CHECK(t.discounted_return == e.trajectories[0].discounted_return);

  Sampler again(lqr_env(), policy, table1());
  const EsBatch b2 = again.collect_es(ParamVector::Zero(2), norm, table, 0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(b2.trajectories[i].discounted_return == b.trajectories[i].discounted_return);
}

TEST_CASE("es discounted return accumulates front to back") {
  const auto policy = linear_policy(2, 1);
  const auto table = NoiseTable::create(1, 100000, 2);
  SamplerConfig c = table1();
  c.gamma = 0.9;
  Sampler s(lqr_env(), policy, c);
  ObsNormalizer norm{RunningStat(2), false};
  const EsBatch b = s.collect_es(ParamVector::Zero(2), norm, table, 0);
  const auto& t = b.trajectories[3];
  double ret = 0.0, disc = 1.0;
  for (double r : t.rewards) {
    ret += disc * r;
    disc *= 0.9;
  }
  CHECK(t.discounted_return == ret);
}

TEST_CASE("sampler config validation") {
  SamplerConfig c;
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SamplerConfig{};
  c.sigma = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("noise-free episode record") {
  EnvSpec env;
  env.kind = EnvKind::quadratic_bandit;
  env.bandit_horizon = 4;
  auto e = make_env(env);
  PolicySpec p = linear_policy(1, 1);
  Vec theta = Vec::Constant(1, 2.0);
  RngStream s(0);
  const EpisodeRecord rec = run_episode(*e, s, CompiledPolicy(p, theta), ObsNormalizer{RunningStat(1), false});
  CHECK(rec.rewards.size() == 4);
  CHECK(rec.end == DoneReason::timeout);
  CHECK(rec.undiscounted_return() == -16.0);
  CHECK(rec.discounted_return(0.5) == doctest::Approx(-4.0 * (1 + 0.5 + 0.25 + 0.125)));
}
