#include "zoac/sampler/sampler.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace zoac {

std::size_t IterationBatch::transitions() const {
  std::size_t total = 0;
  for (const auto& s : segments) total += s.length();
  return total;
}

std::vector<Fragment> IterationBatch::fragments() const {
  std::vector<Fragment> out;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t base = w * segments_per_worker;
    std::size_t first = base;
    for (std::size_t j = 0; j < segments_per_worker; ++j) {
      const std::size_t idx = base + j;
      const bool last_of_worker = j + 1 == segments_per_worker;
      if (segments[idx].episode_ended() || last_of_worker) {
        out.push_back({w, first, idx});
        first = idx + 1;
      }
    }
  }
  return out;
}

void SamplerConfig::validate() const {
  if (workers < 1) throw std::invalid_argument("sampler: workers < 1");
  if (segments_per_worker < 1) throw std::invalid_argument("sampler: H < 1");
  if (rollout_length < 1) throw std::invalid_argument("sampler: N < 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sampler: sigma < 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("sampler: gamma");
  if (threads < 1) throw std::invalid_argument("sampler: threads < 1");
}

Sampler::Sampler(EnvSpec env_spec, PolicySpec policy_spec, SamplerConfig config)
    : env_spec_(std::move(env_spec)),
      policy_spec_(std::move(policy_spec)),
      config_(config) {
  config_.validate();
  policy_spec_.validate();
  reset_workers();
}

void Sampler::reset_workers() {
  workers_.clear();
  for (int i = 0; i < config_.workers; ++i) {
    Worker w;
    w.env = make_env(env_spec_);
    w.stream = RngStream::derive(config_.env_seed,
                                 {kEnvStreamTag, static_cast<std::uint64_t>(i)});
    workers_.push_back(std::move(w));
  }
  const auto& env = *workers_.front().env;
  if (env.obs_dim() != policy_spec_.obs_dim || env.act_dim() != policy_spec_.act_dim) {
    throw std::invalid_argument("sampler: policy dimensions do not match environment");
  }
}

template <typename Fn>
void Sampler::run_parallel(Fn&& fn) {
  const std::size_t n = workers_.size();
  const std::size_t threads = std::min<std::size_t>(config_.threads, n);
  std::vector<std::exception_ptr> errors(n);
  auto run_range = [&](std::size_t t) {
    for (std::size_t i = t; i < n; i += threads) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run_range, t);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SamplerError(i, e.what());
    }
  }
}

namespace {

Mat stack_rows(const std::vector<std::vector<Vec>>& per_worker, int dim) {
  std::size_t rows = 0;
  for (const auto& w : per_worker) rows += w.size();
  Mat out(static_cast<Eigen::Index>(rows), dim);
  Eigen::Index r = 0;
  for (const auto& w : per_worker) {
    for (const auto& x : w) out.row(r++) = x.transpose();
  }
  return out;
}

}  // namespace

IterationBatch Sampler::collect(const ParamVector& theta, const ObsNormalizer& snapshot,
                                const NoiseTable& table, std::uint64_t iteration) {
  const auto n = workers_.size();
  const auto H = static_cast<std::size_t>(config_.segments_per_worker);
  const int N = config_.rollout_length;
  IterationBatch batch;
  batch.workers = n;
  batch.segments_per_worker = H;
  batch.segments.resize(n * H);
  std::vector<std::vector<Vec>> raw(n);

  run_parallel([&](std::size_t i) {
    Worker& w = workers_[i];
    for (std::size_t j = 0; j < H; ++j) {
      Segment& seg = batch.segments[i * H + j];
      // Drawn before anything else so index consumption never depends on
      // how the segment ends.
      RngStream noise_stream = RngStream::derive(
          config_.noise_seed, {kNoiseStreamTag, iteration, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j)});
      seg.noise = draw_index(noise_stream, table);
      if (w.needs_reset) {
        w.raw_obs = w.env->reset(w.stream).observation;
        w.needs_reset = false;
        seg.starts_episode = true;
      }
      const CompiledPolicy policy(policy_spec_,
                                  perturb(theta, seg.noise, config_.sigma, table));
      Vec obs = snapshot(w.raw_obs);
      seg.observations.push_back(obs);
      for (int k = 0; k < N; ++k) {
        raw[i].push_back(w.raw_obs);
        Vec action = policy.act(obs);
        StepResult res = w.env->step(action);
        seg.actions.push_back(std::move(action));
        seg.rewards.push_back(res.reward);
        w.raw_obs = std::move(res.observation);
        obs = snapshot(w.raw_obs);
        seg.observations.push_back(obs);
        if (res.done) {
          seg.terminal = res.reason == DoneReason::terminal;
          seg.timeout = res.reason == DoneReason::timeout;
          w.needs_reset = true;
          break;
        }
      }
    }
  });

  batch.raw_observations = stack_rows(raw, policy_spec_.obs_dim);
  batch.env_steps = batch.transitions();
  return batch;
}

EsBatch Sampler::collect_es(const ParamVector& theta, const ObsNormalizer& snapshot,
                            const NoiseTable& table, std::uint64_t iteration) {
  const auto n = workers_.size();
  const long budget =
      static_cast<long>(config_.rollout_length) * config_.segments_per_worker;
  EsBatch batch;
  batch.trajectories.resize(n);
  std::vector<std::vector<Vec>> raw(n);

  run_parallel([&](std::size_t i) {
    Worker& w = workers_[i];
    EsTrajectory& traj = batch.trajectories[i];
    RngStream noise_stream = RngStream::derive(
        config_.noise_seed,
        {kNoiseStreamTag, iteration, static_cast<std::uint64_t>(i), std::uint64_t{0}});
    traj.noise = draw_index(noise_stream, table);
    w.raw_obs = w.env->reset(w.stream).observation;
    const CompiledPolicy policy(policy_spec_,
                                perturb(theta, traj.noise, config_.sigma, table));
    double discount = 1.0;
    double ret = 0.0;
    for (long k = 0; k < budget; ++k) {
      raw[i].push_back(w.raw_obs);
      StepResult res = w.env->step(policy.act(snapshot(w.raw_obs)));
      traj.rewards.push_back(res.reward);
      ret += discount * res.reward;
      discount *= config_.gamma;
      w.raw_obs = std::move(res.observation);
      if (res.done) {
        traj.terminal = res.reason == DoneReason::terminal;
        traj.timeout = res.reason == DoneReason::timeout;
        break;
      }
    }
    traj.discounted_return = ret;
    w.needs_reset = true;
  });

  batch.raw_observations = stack_rows(raw, policy_spec_.obs_dim);
  for (const auto& t : batch.trajectories) batch.env_steps += t.rewards.size();
  return batch;
}

std::vector<Sampler::WorkerState> Sampler::save() const {
  std::vector<WorkerState> out;
  for (const auto& w : workers_) {
    out.push_back({w.env->save_state(), w.stream.counter(), w.needs_reset, w.raw_obs});
  }
  return out;
}

void Sampler::load(const std::vector<WorkerState>& states) {
  if (states.size() != workers_.size()) {
    throw std::invalid_argument("sampler: worker count mismatch on load");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    workers_[i].env->load_state(states[i].env_state);
    workers_[i].stream.set_counter(states[i].stream_counter);
    workers_[i].needs_reset = states[i].needs_reset;
    workers_[i].raw_obs = states[i].raw_obs;
  }
}

double EpisodeRecord::undiscounted_return() const {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

double EpisodeRecord::discounted_return(double gamma) const {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

EpisodeRecord run_episode(Environment& env, RngStream& reset_stream,
                          const CompiledPolicy& policy, const ObsNormalizer& normalizer) {
  EpisodeRecord rec;
  Vec raw = env.reset(reset_stream).observation;
  while (true) {
    Vec obs = normalizer(raw);
    StepResult res = env.step(policy.act(obs));
    rec.observations.push_back(std::move(obs));
    rec.rewards.push_back(res.reward);
    raw = std::move(res.observation);
    if (res.done) {
      rec.end = res.reason;
      return rec;
    }
  }
}

}  // namespace zoac
