#include "zoac/analysis/variance.hpp"

#include <cmath>
#include <stdexcept>

#include "zoac/baselines/es.hpp"
#include "zoac/improvement/advantages.hpp"

namespace zoac {

double estimator_variance(std::span<const Vec> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("estimator_variance: need at least two samples");
  }
  const Eigen::Index d = samples.front().size();
  Vec mean = Vec::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw std::invalid_argument("estimator_variance: ragged samples");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  double total = 0.0;
  for (const auto& s : samples) total += (s - mean).squaredNorm();
  return total / static_cast<double>(samples.size() - 1);
}

namespace {

void check_bound_domain(double alpha, double gamma, int N, int H, int n, double sigma,
                        std::size_t d) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("variance bound: gamma");
  if (!(sigma > 0.0)) throw std::domain_error("variance bound: sigma <= 0");
  if (N < 1 || H < 1 || n < 1 || d < 1) throw std::domain_error("variance bound: counts");
  if (alpha < 0.0) throw std::domain_error("variance bound: alpha < 0");
}

}  // namespace

double es_variance_bound(double alpha, double gamma, int N, int H, int n, double sigma,
                         std::size_t d) {
  check_bound_domain(alpha, gamma, N, H, n, sigma, d);
  const double num = std::pow(1.0 - std::pow(gamma, N * H), 2) * alpha * alpha *
                     static_cast<double>(d);
  return num / (n * sigma * sigma * (1.0 - gamma) * (1.0 - gamma));
}

double zoac_variance_bound(double alpha, double phi, double gamma, int N, int H, int n,
                           double sigma, std::size_t d) {
  check_bound_domain(alpha, gamma, N, H, n, sigma, d);
  if (phi < 0.0) throw std::domain_error("variance bound: phi < 0");
  const double gn = std::pow(gamma, N);
  const double inner = (1.0 - gn) * alpha + (1.0 - gamma) * (1.0 + gn) * phi;
  return inner * inner * static_cast<double>(d) /
         (static_cast<double>(n) * H * sigma * sigma * (1.0 - gamma) * (1.0 - gamma));
}

std::string to_string(EstimatorKind k) { return k == EstimatorKind::es ? "es" : "zoac"; }

nlohmann::json VarianceReport::to_json() const {
  return {{"estimator", to_string(kind)},
          {"empirical_variance", empirical_variance},
          {"bound", bound},
          {"within_bound", within_bound()},
          {"samples", samples},
          {"alpha", alpha},
          {"phi", phi},
          {"gamma", gamma},
          {"N", N},
          {"H", H},
          {"n", n},
          {"sigma", sigma},
          {"d", d},
          {"mean_gradient", std::vector<double>(mean_gradient.begin(), mean_gradient.end())}};
}

namespace {

Sampler make_harness_sampler(const VarianceHarnessConfig& cfg) {
  SamplerConfig sc;
  sc.workers = cfg.workers;
  sc.segments_per_worker = cfg.segments_per_worker;
  sc.rollout_length = cfg.rollout_length;
  sc.sigma = cfg.sigma;
  sc.gamma = cfg.gamma;
  sc.threads = 1;
  sc.env_seed = cfg.env_seed;
  sc.noise_seed = cfg.noise_seed;
  return Sampler(cfg.env, cfg.policy, sc);
}

ObsNormalizer identity_normalizer(int dim) {
  ObsNormalizer norm{RunningStat(dim), false};
  return norm;
}

Vec sample_mean(const std::vector<Vec>& samples) {
  Vec mean = Vec::Zero(samples.front().size());
  for (const auto& s : samples) mean += s;
  return mean / static_cast<double>(samples.size());
}

}  // namespace

std::vector<Vec> zoac_gradient_samples(const VarianceHarnessConfig& cfg,
                                       const StateValue& critic, const NoiseTable& table,
                                       double* phi_out) {
  Sampler sampler = make_harness_sampler(cfg);
  const ObsNormalizer norm = identity_normalizer(cfg.policy.obs_dim);
  std::vector<Vec> out;
  out.reserve(cfg.samples);
  double phi = 0.0;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    sampler.reset_workers();
    const IterationBatch batch = sampler.collect(cfg.theta, norm, table, s);
    const SegmentValues values = evaluate_segment_values(batch, critic);
    for (const auto& v : values) phi = std::max(phi, v.cwiseAbs().maxCoeff());
    const auto advs = compute_segment_advantages(batch, values, cfg.gamma, cfg.lambda);
    out.push_back(zoac_gradient(advs, table, cfg.sigma));
  }
  if (phi_out != nullptr) *phi_out = phi;
  return out;
}

std::vector<Vec> es_gradient_samples(const VarianceHarnessConfig& cfg, const NoiseTable& table) {
  Sampler sampler = make_harness_sampler(cfg);
  const ObsNormalizer norm = identity_normalizer(cfg.policy.obs_dim);
  std::vector<Vec> out;
  out.reserve(cfg.samples);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    sampler.reset_workers();
    const EsBatch batch = sampler.collect_es(cfg.theta, norm, table, s);
    const auto dirs = es_directions(batch);
    out.push_back(es_gradient(dirs, table, cfg.sigma, false));
  }
  return out;
}

VarianceReport zoac_variance_report(const VarianceHarnessConfig& cfg, const StateValue& critic,
                                    const NoiseTable& table) {
  VarianceReport r;
  const auto samples = zoac_gradient_samples(cfg, critic, table, &r.phi);
  r.kind = EstimatorKind::zoac;
  r.empirical_variance = estimator_variance(samples);
  r.samples = samples.size();
  r.alpha = make_env(cfg.env)->reward_bound();
  r.gamma = cfg.gamma;
  r.N = cfg.rollout_length;
  r.H = cfg.segments_per_worker;
  r.n = cfg.workers;
  r.sigma = cfg.sigma;
  r.d = static_cast<std::size_t>(cfg.theta.size());
  r.bound = zoac_variance_bound(r.alpha, r.phi, r.gamma, r.N, r.H, r.n, r.sigma, r.d);
  r.mean_gradient = sample_mean(samples);
  return r;
}

VarianceReport es_variance_report(const VarianceHarnessConfig& cfg, const NoiseTable& table) {
  VarianceReport r;
  const auto samples = es_gradient_samples(cfg, table);
  r.kind = EstimatorKind::es;
  r.empirical_variance = estimator_variance(samples);
  r.samples = samples.size();
  r.alpha = make_env(cfg.env)->reward_bound();
  r.gamma = cfg.gamma;
  r.N = cfg.rollout_length;
  r.H = cfg.segments_per_worker;
  r.n = cfg.workers;
  r.sigma = cfg.sigma;
  r.d = static_cast<std::size_t>(cfg.theta.size());
  r.bound = es_variance_bound(r.alpha, r.gamma, r.N, r.H, r.n, r.sigma, r.d);
  r.mean_gradient = sample_mean(samples);
  return r;
}

FunctionValue lqr_oracle_critic(const LqrSpec& spec, const PolicySpec& policy,
                                const ParamVector& theta) {
  if (policy.kind != PolicyKind::linear || policy.output != OutputSquash::identity) {
    throw std::invalid_argument("lqr_oracle_critic: needs a linear policy with identity output");
  }
  const Mat gain = Eigen::Map<const RowMat>(theta.data(), policy.act_dim, policy.obs_dim);
  const Mat P = lqr_value_oracle(spec, gain);
  return FunctionValue([P](const Vec& x) { return -x.dot(P * x); });
}

}  // namespace zoac
