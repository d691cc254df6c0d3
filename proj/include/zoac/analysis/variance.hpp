#ifndef ZOAC_ANALYSIS_VARIANCE_HPP_
#define ZOAC_ANALYSIS_VARIANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "zoac/envs/env_spec.hpp"
#include "zoac/envs/lqr.hpp"
#include "zoac/evaluation/critic.hpp"
#include "zoac/noise/noise_table.hpp"
#include "zoac/policies/policy.hpp"
#include "zoac/sampler/sampler.hpp"

namespace zoac {

// Sum over coordinates of the unbiased sample variance. Needs >= 2 samples.
double estimator_variance(std::span<const Vec> samples);

// Upper bound on the trace variance of the episode-wise estimator over n
// trajectories of N*H steps with |r| <= alpha.
double es_variance_bound(double alpha, double gamma, int N, int H, int n, double sigma,
                         std::size_t d);
// Same for the N-step estimator over n*H directions with |V_w| <= phi.
double zoac_variance_bound(double alpha, double phi, double gamma, int N, int H, int n,
                           double sigma, std::size_t d);

enum class EstimatorKind { es, zoac };
std::string to_string(EstimatorKind k);

struct VarianceReport {
  EstimatorKind kind = EstimatorKind::zoac;
  double empirical_variance = 0.0;
  double bound = 0.0;
  std::size_t samples = 0;
  double alpha = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
  int N = 0;
  int H = 0;
  int n = 0;
  double sigma = 0.0;
  std::size_t d = 0;
  Vec mean_gradient;

  bool within_bound() const { return empirical_variance <= bound; }
  nlohmann::json to_json() const;
};

// Repeated gradient estimates at a frozen theta. Every sample starts from the
// same environment seed set; only the perturbation draws change (sample s
// uses noise iteration s). Observation normalization is off.
struct VarianceHarnessConfig {
  EnvSpec env;
  PolicySpec policy;
  ParamVector theta;
  int workers = 8;
  int segments_per_worker = 16;
  int rollout_length = 10;
  double sigma = 0.06;
  double gamma = 0.99;
  double lambda = 1.0;
  std::size_t samples = 1000;
  std::uint64_t env_seed = 1;
  std::uint64_t noise_seed = 2;
};

std::vector<Vec> zoac_gradient_samples(const VarianceHarnessConfig& cfg,
                                       const StateValue& critic, const NoiseTable& table,
                                       double* phi_out = nullptr);
std::vector<Vec> es_gradient_samples(const VarianceHarnessConfig& cfg, const NoiseTable& table);

VarianceReport zoac_variance_report(const VarianceHarnessConfig& cfg, const StateValue& critic,
                                    const NoiseTable& table);
VarianceReport es_variance_report(const VarianceHarnessConfig& cfg, const NoiseTable& table);

// Exact V(x) = -x^T P x of a linear identity-output policy on an LQR task
// (ignores clipping and the finite horizon). Throws std::invalid_argument for
// other policy kinds and DivergenceError for an unstable closed loop.
FunctionValue lqr_oracle_critic(const LqrSpec& spec, const PolicySpec& policy,
                                const ParamVector& theta);

}  // namespace zoac

#endif  // ZOAC_ANALYSIS_VARIANCE_HPP_
