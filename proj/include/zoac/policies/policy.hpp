#ifndef ZOAC_POLICIES_POLICY_HPP_
#define ZOAC_POLICIES_POLICY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "zoac/numkit/rng.hpp"
#include "zoac/types.hpp"

namespace zoac {

enum class PolicyKind { linear, mlp, toeplitz, masked };
enum class OutputSquash { tanh, identity };

PolicyKind parse_policy_kind(const std::string& s);
std::string to_string(PolicyKind k);
OutputSquash parse_output_squash(const std::string& s);
std::string to_string(OutputSquash s);

// Deterministic policy architecture. Parameters live in one flat vector whose
// layout is fixed by the spec:
//   linear:   W (act x obs, row-major), no bias
//   mlp:      per layer W, b [, ln gain, ln shift]
//   toeplitz: per layer first column (m), first-row tail (n-1), b [, ln]
//   masked:   per layer W, b, active logits (m x n), pruned logits (m x n) [, ln]
// Layer norm only applies to hidden layers.
struct PolicySpec {
  PolicyKind kind = PolicyKind::linear;
  int obs_dim = 1;
  int act_dim = 1;
  std::vector<int> hidden{64, 64};
  bool layer_norm = true;
  OutputSquash output = OutputSquash::tanh;
  // Actions are action_bound * tanh(z) under tanh squashing.
  double action_bound = 1.0;
  double mask_temperature = 0.01;

  std::vector<int> layer_sizes() const;
  std::size_t param_count() const;
  void validate() const;
};

std::size_t layer_param_count(PolicyKind kind, int in, int out, bool hidden_norm);

// Initial parameters: zeros for linear policies, fan-in uniform weights
// otherwise, masks starting fully active.
ParamVector init_policy_params(const PolicySpec& spec, RngStream& stream);

// Matrix with T(i, j) = first_col(i - j) for i >= j and
// first_row_tail(j - i - 1) otherwise.
Mat toeplitz_expand(const Vec& first_col, const Vec& first_row_tail);

struct MaskLogits {
  Mat active;
  Mat pruned;
};

// Elementwise two-way softmax at temperature alpha: probability of "active".
Mat mask_matrix(const MaskLogits& logits, double alpha);
Vec masked_forward(const Mat& weights, const MaskLogits& logits, double alpha,
                   const Vec& x);
// Mean mask activation (fraction of effective edges).
double mask_usage(const MaskLogits& logits, double alpha);
// Mean mask activation over every masked layer of the policy; 1 for kinds
// without masks.
double policy_mask_usage(const PolicySpec& spec, const ParamVector& theta);

// A policy with its weight matrices materialized; build once per perturbation
// and call act() for every step of the segment.
class CompiledPolicy {
 public:
  CompiledPolicy(const PolicySpec& spec, const ParamVector& theta);

  Vec act(const Vec& obs) const;
  // Output before squashing/scaling.
  Vec pre_squash(const Vec& obs) const;

 private:
  struct Layer {
    RowMat weight;
    Vec bias;
    Vec gain;
    Vec shift;
    bool norm = false;
  };
  PolicySpec spec_;
  std::vector<Layer> layers_;
};

Vec policy_act(const PolicySpec& spec, const ParamVector& theta, const Vec& obs);

}  // namespace zoac

#endif  // ZOAC_POLICIES_POLICY_HPP_
