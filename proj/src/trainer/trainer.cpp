#include "zoac/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "zoac/baselines/es.hpp"
#include "zoac/evaluation/value_targets.hpp"
#include "zoac/improvement/advantages.hpp"

namespace zoac {

namespace {

void fill_stats(MetricsRecord& rec, const std::vector<double>& xs) {
  if (xs.empty()) return;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  rec.adv_mean = mean;
  rec.adv_std = std::sqrt(ss / n);
  rec.adv_min = *std::min_element(xs.begin(), xs.end());
  rec.adv_max = *std::max_element(xs.begin(), xs.end());
}

SamplerConfig sampler_config(const TrainerConfig& c, const RunSeeds& seeds) {
  SamplerConfig s;
  s.workers = c.workers;
  s.segments_per_worker = c.train_frequency;
  s.rollout_length = c.rollout_length;
  s.sigma = c.sigma;
  s.gamma = c.gamma;
  s.threads = c.threads;
  s.env_seed = seeds.env;
  s.noise_seed = seeds.noise_index;
  return s;
}

TrainerConfig finalized(TrainerConfig c) {
  c.finalize();
  return c;
}

}  // namespace

double EvalResult::mean_return() const {
  if (returns.empty()) return 0.0;
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

EvalResult evaluate_policy(const PolicySpec& spec, const ParamVector& theta, const EnvSpec& env,
                           const ObsNormalizer& normalizer, std::size_t episodes, double gamma,
                           std::uint64_t seed) {
  EvalResult out;
  auto e = make_env(env);
  const CompiledPolicy policy(spec, theta);
  for (std::size_t i = 0; i < episodes; ++i) {
    RngStream stream = RngStream::derive(seed, {kEvalStreamTag, static_cast<std::uint64_t>(i)});
    EpisodeRecord rec = run_episode(*e, stream, policy, normalizer);
    out.returns.push_back(rec.undiscounted_return());
    out.discounted_returns.push_back(rec.discounted_return(gamma));
    out.episodes.push_back(std::move(rec));
  }
  return out;
}

RunSeeds RunSeeds::from_master(std::uint64_t master) {
  RunSeeds s;
  s.env = RngStream::derive(master, {kEnvStreamTag}).next_u64();
  s.noise_index = RngStream::derive(master, {kNoiseStreamTag}).next_u64();
  s.eval = RngStream::derive(master, {kEvalStreamTag}).next_u64();
  return s;
}

Trainer::Trainer(TrainerConfig config)
    : config_(finalized(std::move(config))),
      seeds_(RunSeeds::from_master(config_.seed)),
      table_(NoiseTable::create(config_.noise_seed, config_.table_size, config_.policy.param_count())),
      sampler_(config_.env, config_.policy, sampler_config(config_, seeds_)),
      start_(std::chrono::steady_clock::now()) {
  RngStream actor_init = RngStream::derive(config_.seed, {kInitStreamTag, 0});
  theta_ = init_policy_params(config_.policy, actor_init);
  actor_adam_ = AdamState::zeros(theta_.size(), config_.actor_lr);
  if (has_critic()) {
    CriticConfig cc;
    cc.hidden = config_.critic_hidden;
    cc.lr = config_.critic_lr;
    cc.gamma = config_.gamma;
    cc.lambda = config_.lambda;
    RngStream critic_init = RngStream::derive(config_.seed, {kInitStreamTag, 1});
    critic_ = CriticNet(config_.policy.obs_dim, cc, critic_init);
  }
  normalizer_.stat = RunningStat(config_.policy.obs_dim);
  normalizer_.enabled = config_.obs_norm;
}

Trainer::Trainer(const TrainerState& s) : Trainer(s.config) {
  if (s.theta.size() != theta_.size()) throw CheckpointError("checkpoint theta has the wrong size");
  theta_ = s.theta;
  actor_adam_.m = s.actor_adam.m;
  actor_adam_.v = s.actor_adam.v;
  actor_adam_.t = s.actor_adam.t;
  if (has_critic()) {
    if (s.critic_params.size() != critic_.mlp().params().size()) {
      throw CheckpointError("checkpoint critic has the wrong size");
    }
    critic_.mlp().params() = s.critic_params;
    critic_.adam().m = s.critic_adam.m;
    critic_.adam().v = s.critic_adam.v;
    critic_.adam().t = s.critic_adam.t;
  }
  if (s.obs_stat.dim() != config_.policy.obs_dim) {
    throw CheckpointError("checkpoint normalizer has the wrong size");
  }
  normalizer_.stat = s.obs_stat;
  if (s.workers.size() != static_cast<std::size_t>(config_.workers)) {
    throw CheckpointError("checkpoint worker count does not match the config");
  }
  sampler_.load(s.workers);
  iteration_ = s.iteration;
  env_steps_ = s.env_steps;
}

bool Trainer::has_critic() const {
  return config_.algo == Algo::zoac && config_.critic == CriticKind::mlp;
}

bool Trainer::eval_due(std::uint64_t completed) const {
  if (completed == static_cast<std::uint64_t>(config_.iterations)) return true;
  return config_.eval_interval > 0 && completed % static_cast<std::uint64_t>(config_.eval_interval) == 0;
}

TrainerState Trainer::state() const {
  TrainerState s;
  s.config = config_;
  s.iteration = iteration_;
  s.env_steps = env_steps_;
  s.theta = theta_;
  s.actor_adam = actor_adam_;
  if (has_critic()) {
    s.critic_params = critic_.mlp().params();
    s.critic_adam = critic_.adam();
  }
  s.obs_stat = normalizer_.stat;
  s.workers = sampler_.save();
  return s;
}

EvalResult Trainer::evaluate() const {
  return evaluate_policy(config_.policy, theta_, config_.env, normalizer_,
                         static_cast<std::size_t>(config_.eval_episodes), config_.gamma, seeds_.eval);
}

Vec Trainer::zoac_direction(MetricsRecord& rec) {
  const ObsNormalizer snapshot = normalizer_;
  const IterationBatch batch = sampler_.collect(theta_, snapshot, table_, iteration_);
  env_steps_ += batch.env_steps;
  if (config_.obs_norm) normalizer_.stat.update(batch.raw_observations);

  const ZeroValue zero;
  const StateValue& value = has_critic() ? static_cast<const StateValue&>(critic_) : zero;
  const SegmentValues values = evaluate_segment_values(batch, value);
  double phi = 0.0;
  for (const auto& v : values) {
    if (v.size() > 0) phi = std::max(phi, v.cwiseAbs().maxCoeff());
  }
  rec.phi = phi;

  std::vector<DirectionAdvantage> advs =
      compute_segment_advantages(batch, values, config_.gamma, config_.lambda);
  std::vector<double> raw;
  raw.reserve(advs.size());
  for (const auto& a : advs) raw.push_back(a.advantage);
  fill_stats(rec, raw);

  if (has_critic()) {
    const ValueTargetSet targets = compute_value_targets(batch, values, config_.gamma, config_.lambda);
    RngStream shuffle = RngStream::derive(config_.seed, {kShuffleStreamTag, iteration_});
    const CriticUpdateResult fit =
        critic_update(critic_, targets, static_cast<std::size_t>(config_.batch_size),
                      static_cast<std::size_t>(config_.epochs), shuffle);
    if (!fit.epoch_loss.empty()) rec.critic_loss = fit.epoch_loss.back();
  }

  if (config_.normalize_advantages) advs = normalize_advantages(std::move(advs));
  if (config_.policy.kind == PolicyKind::masked) {
    const double beta = beta_schedule(iteration_, static_cast<std::size_t>(config_.iterations),
                                      config_.beta_start, config_.beta_end);
    rec.beta = beta;
    for (auto& a : advs) {
      const double usage =
          policy_mask_usage(config_.policy, perturb(theta_, a.noise, config_.sigma, table_));
      a.advantage = masked_advantage(a.advantage, usage, beta);
    }
  }
  if (config_.sift > 0) advs = sift_top_directions(advs, static_cast<std::size_t>(config_.sift));
  return zoac_gradient(advs, table_, config_.sigma);
}

Vec Trainer::es_direction(MetricsRecord& rec) {
  const ObsNormalizer snapshot = normalizer_;
  const EsBatch batch = sampler_.collect_es(theta_, snapshot, table_, iteration_);
  env_steps_ += batch.env_steps;
  if (config_.obs_norm) normalizer_.stat.update(batch.raw_observations);
  const std::vector<EsDirection> dirs = es_directions(batch);
  std::vector<double> returns;
  for (const auto& d : dirs) returns.push_back(d.ret);
  fill_stats(rec, returns);
  return es_gradient(dirs, table_, config_.sigma, config_.es_shaped);
}

MetricsRecord Trainer::step() {
  MetricsRecord rec;
  rec.algo = to_string(config_.algo);
  const Vec g = config_.algo == Algo::zoac ? zoac_direction(rec) : es_direction(rec);
  rec.grad_norm = g.norm();
  // Ascent on the estimated gradient, expressed as a minimizer step.
  const Vec neg = -g;
  adam_step(actor_adam_, theta_, neg);
  ++iteration_;
  rec.iteration = iteration_;
  rec.env_steps = env_steps_;
  if (config_.policy.kind == PolicyKind::masked) {
    rec.mask_usage = policy_mask_usage(config_.policy, theta_);
  }
  if (eval_due(iteration_)) {
    const EvalResult ev = evaluate();
    rec.eval_mean_return = ev.mean_return();
    rec.eval_returns = ev.returns;
    rec.eval_discounted_returns = ev.discounted_returns;
    if (has_critic()) rec.value_gap = value_gap(critic_, ev.episodes, config_.gamma).gap;
  }
  if (config_.record_wall_time) {
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  return rec;
}

TrainSummary run_training(const TrainerConfig& config, const std::optional<std::string>& resume,
                          std::ostream* log) {
  std::unique_ptr<Trainer> trainer;
  TrainerConfig effective = config;
  if (resume) {
    TrainerState st = load_checkpoint(*resume);
    st.config.out_dir = config.out_dir;
    st.config.threads = config.threads;
    st.config.iterations = config.iterations;
    st.config.eval_interval = config.eval_interval;
    st.config.checkpoint_interval = config.checkpoint_interval;
    st.config.record_wall_time = config.record_wall_time;
    trainer = std::make_unique<Trainer>(st);
  } else {
    trainer = std::make_unique<Trainer>(config);
  }
  effective = trainer->config();

  std::filesystem::create_directories(effective.out_dir);
  {
    std::ofstream ini(std::filesystem::path(effective.out_dir) / "config.ini");
    ini << config_to_ini(effective);
  }
  const std::string metrics_path = (std::filesystem::path(effective.out_dir) / "metrics.jsonl").string();
  MetricsWriter writer(metrics_path, resume ? std::optional<std::uint64_t>(trainer->iteration() + 1)
                                            : std::nullopt);

  TrainSummary summary;
  if (!resume) {
    summary.final_checkpoint = checkpoint_path(effective.out_dir, 0);
    save_checkpoint(trainer->state(), summary.final_checkpoint);
  }
  const auto total = static_cast<std::uint64_t>(effective.iterations);
  while (trainer->iteration() < total) {
    const MetricsRecord rec = trainer->step();
    writer.write(rec);
    if (log != nullptr && rec.eval_mean_return) {
      *log << "iteration " << rec.iteration << "  env_steps " << rec.env_steps
           << "  eval_return " << *rec.eval_mean_return << '\n';
    }
    const std::uint64_t k = trainer->iteration();
    if (k == total || (effective.checkpoint_interval > 0 &&
                       k % static_cast<std::uint64_t>(effective.checkpoint_interval) == 0)) {
      summary.final_checkpoint = checkpoint_path(effective.out_dir, k);
      save_checkpoint(trainer->state(), summary.final_checkpoint);
    }
    if (rec.eval_mean_return) summary.final_eval_return = rec.eval_mean_return;
  }
  summary.iterations = trainer->iteration();
  return summary;
}

}  // namespace zoac
