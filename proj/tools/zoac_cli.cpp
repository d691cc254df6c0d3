// Command-line front end: train, eval, variance-check, compare-estimators,
// export-metrics.
#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zoac/analysis/variance.hpp"
#include "zoac/trainer/trainer.hpp"

namespace {

using zoac::TrainerConfig;

// Adds --<key> for every config field not handled explicitly.
void add_field_flags(CLI::App* app, std::map<std::string, std::string>& values,
                     const std::vector<std::string>& skip) {
  for (const auto& f : zoac::config_fields()) {
    if (std::find(skip.begin(), skip.end(), f.key) != skip.end()) continue;
    app->add_option("--" + f.key, values[f.key], "[" + f.section + "] " + f.help);
  }
}

void apply_flags(TrainerConfig& cfg, CLI::App* app, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (app->count("--" + key) > 0) zoac::apply_config_value(cfg, key, value);
  }
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

zoac::VarianceHarnessConfig harness_from(const TrainerConfig& cfg, const zoac::ParamVector& theta,
                                         std::size_t samples, std::uint64_t seed) {
  zoac::VarianceHarnessConfig h;
  h.env = cfg.env;
  h.policy = cfg.policy;
  h.theta = theta;
  h.workers = cfg.workers;
  h.segments_per_worker = cfg.train_frequency;
  h.rollout_length = cfg.rollout_length;
  h.sigma = cfg.sigma;
  h.gamma = cfg.gamma;
  h.lambda = 1.0;
  h.samples = samples;
  const auto seeds = zoac::RunSeeds::from_master(seed);
  h.env_seed = seeds.env;
  h.noise_seed = seeds.noise_index;
  return h;
}

// Oracle critic on LQR with a linear identity policy; V = 0 otherwise.
std::unique_ptr<zoac::StateValue> analysis_critic(const TrainerConfig& cfg,
                                                  const zoac::ParamVector& theta) {
  if (cfg.env.kind == zoac::EnvKind::lqr && cfg.policy.kind == zoac::PolicyKind::linear &&
      cfg.policy.output == zoac::OutputSquash::identity) {
    return std::make_unique<zoac::FunctionValue>(zoac::lqr_oracle_critic(cfg.env.lqr, cfg.policy, theta));
  }
  return std::make_unique<zoac::ZeroValue>();
}

zoac::ParamVector analysis_theta(const TrainerConfig& cfg, const std::string& checkpoint) {
  if (!checkpoint.empty()) return zoac::load_checkpoint(checkpoint).theta;
  return zoac::ParamVector::Zero(static_cast<Eigen::Index>(cfg.policy.param_count()));
}

TrainerConfig load_with_flags(const std::string& path, CLI::App* app,
                              const std::map<std::string, std::string>& values) {
  TrainerConfig cfg = path.empty() ? TrainerConfig{} : zoac::load_config_file(path);
  apply_flags(cfg, app, values);
  cfg.finalize();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order actor-critic trainer and analysis tools"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run the training loop");
  std::string train_config;
  std::uint64_t train_seed = 0;
  std::string train_out;
  std::string resume;
  bool quiet = false;
  std::map<std::string, std::string> train_values;
  train->add_option("--config", train_config, "INI configuration file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "master seed")->required();
  train->add_option("--out-dir", train_out, "output directory")->required();
  train->add_option("--resume", resume, "checkpoint to continue from")->check(CLI::ExistingFile);
  train->add_flag("--quiet", quiet, "no progress output");
  add_field_flags(train, train_values, {"seed", "out_dir"});

  // eval
  auto* eval = app.add_subcommand("eval", "noise-free evaluation of a checkpoint");
  std::string eval_ckpt;
  int eval_episodes = 10;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--episodes", eval_episodes, "number of episodes")->check(CLI::PositiveNumber);

  // variance-check
  auto* var = app.add_subcommand("variance-check", "empirical estimator variance against its bound");
  std::string var_config;
  std::string var_ckpt;
  std::size_t var_samples = 1000;
  std::uint64_t var_seed = 0;
  std::map<std::string, std::string> var_values;
  var->add_option("--config", var_config, "INI configuration file")->check(CLI::ExistingFile);
  var->add_option("--checkpoint", var_ckpt, "take theta from this checkpoint (default zeros)")
      ->check(CLI::ExistingFile);
  var->add_option("--samples", var_samples, "gradient samples per estimator");
  var->add_option("--seed", var_seed, "harness seed");
  add_field_flags(var, var_values, {"seed"});

  // compare-estimators
  auto* cmp = app.add_subcommand("compare-estimators",
                                 "fixed-budget ES vs ZOAC gradient variance over H");
  std::string cmp_config;
  std::string cmp_ckpt;
  int cmp_budget = 160;
  std::string cmp_hs = "1,2,4,8,16";
  std::size_t cmp_samples = 200;
  std::uint64_t cmp_seed = 0;
  std::map<std::string, std::string> cmp_values;
  cmp->add_option("--config", cmp_config, "INI configuration file")->check(CLI::ExistingFile);
  cmp->add_option("--checkpoint", cmp_ckpt, "take theta from this checkpoint (default zeros)")
      ->check(CLI::ExistingFile);
  cmp->add_option("--budget", cmp_budget, "steps per worker, N * H");
  cmp->add_option("--h-values", cmp_hs, "comma-separated H values dividing the budget");
  cmp->add_option("--samples", cmp_samples, "gradient samples per estimator");
  cmp->add_option("--seed", cmp_seed, "harness seed");
  add_field_flags(cmp, cmp_values, {"seed", "train_frequency", "rollout_length"});

  // export-metrics
  auto* exp = app.add_subcommand("export-metrics", "convert metrics.jsonl to CSV");
  std::string exp_in;
  std::string exp_out;
  exp->add_option("--input", exp_in, "metrics.jsonl")->required()->check(CLI::ExistingFile);
  exp->add_option("--output", exp_out, "CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      TrainerConfig cfg = zoac::load_config_file(train_config);
      apply_flags(cfg, train, train_values);
      cfg.seed = train_seed;
      cfg.out_dir = train_out;
      cfg.finalize();
      const auto summary = zoac::run_training(
          cfg, resume.empty() ? std::nullopt : std::optional<std::string>(resume),
          quiet ? nullptr : &std::cout);
      if (!quiet) {
        std::cout << "done: " << summary.iterations << " iterations, checkpoint "
                  << summary.final_checkpoint << '\n';
      }
    } else if (eval->parsed()) {
      const zoac::Trainer trainer(zoac::load_checkpoint(eval_ckpt));
      const auto& c = trainer.config();
      const auto res = zoac::evaluate_policy(c.policy, trainer.theta(), c.env, trainer.normalizer(),
                                             static_cast<std::size_t>(eval_episodes), c.gamma,
                                             zoac::RunSeeds::from_master(c.seed).eval);
      nlohmann::ordered_json j;
      j["mean_return"] = res.mean_return();
      j["returns"] = res.returns;
      j["discounted_returns"] = res.discounted_returns;
      std::cout << j.dump() << '\n';
    } else if (var->parsed()) {
      const TrainerConfig cfg = load_with_flags(var_config, var, var_values);
      const auto theta = analysis_theta(cfg, var_ckpt);
      const auto h = harness_from(cfg, theta, var_samples, var_seed);
      const auto table = zoac::NoiseTable::create(cfg.noise_seed, cfg.table_size, cfg.policy.param_count());
      const auto critic = analysis_critic(cfg, theta);
      for (const auto& rep : {zoac::es_variance_report(h, table), zoac::zoac_variance_report(h, *critic, table)}) {
        std::cout << rep.to_json().dump() << '\n';
      }
    } else if (cmp->parsed()) {
      TrainerConfig cfg = load_with_flags(cmp_config, cmp, cmp_values);
      const auto theta = analysis_theta(cfg, cmp_ckpt);
      const auto table = zoac::NoiseTable::create(cfg.noise_seed, cfg.table_size, cfg.policy.param_count());
      const auto critic = analysis_critic(cfg, theta);
      for (int H : parse_ints(cmp_hs)) {
        if (H < 1 || cmp_budget % H != 0) {
          throw std::invalid_argument("H = " + std::to_string(H) + " does not divide the budget");
        }
        cfg.train_frequency = H;
        cfg.rollout_length = cmp_budget / H;
        const auto h = harness_from(cfg, theta, cmp_samples, cmp_seed);
        const auto es = zoac::es_variance_report(h, table);
        const auto zo = zoac::zoac_variance_report(h, *critic, table);
        nlohmann::ordered_json j;
        j["H"] = H;
        j["N"] = cfg.rollout_length;
        j["es_variance"] = es.empirical_variance;
        j["zoac_variance"] = zo.empirical_variance;
        j["es_bound"] = es.bound;
        j["zoac_bound"] = zo.bound;
        j["zoac_below_es"] = zo.empirical_variance < es.empirical_variance;
        std::cout << j.dump() << '\n';
      }
    } else if (exp->parsed()) {
      zoac::export_metrics_csv(exp_in, exp_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
