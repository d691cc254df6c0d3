#include "zoac/policies/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "zoac/numkit/mlp.hpp"

namespace zoac {

PolicyKind parse_policy_kind(const std::string& s) {
  if (s == "linear") return PolicyKind::linear;
  if (s == "mlp") return PolicyKind::mlp;
  if (s == "toeplitz") return PolicyKind::toeplitz;
  if (s == "masked") return PolicyKind::masked;
  throw std::invalid_argument("unknown policy kind: " + s);
}

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::linear:
      return "linear";
    case PolicyKind::mlp:
      return "mlp";
    case PolicyKind::toeplitz:
      return "toeplitz";
    case PolicyKind::masked:
      return "masked";
  }
  return "?";
}

OutputSquash parse_output_squash(const std::string& s) {
  if (s == "tanh") return OutputSquash::tanh;
  if (s == "identity") return OutputSquash::identity;
  throw std::invalid_argument("unknown policy output: " + s);
}

std::string to_string(OutputSquash s) {
  return s == OutputSquash::tanh ? "tanh" : "identity";
}

std::vector<int> PolicySpec::layer_sizes() const {
  std::vector<int> sizes{obs_dim};
  if (kind != PolicyKind::linear) sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(act_dim);
  return sizes;
}

std::size_t layer_param_count(PolicyKind kind, int in, int out, bool hidden_norm) {
  const auto n = static_cast<std::size_t>(in);
  const auto m = static_cast<std::size_t>(out);
  const std::size_t norm = hidden_norm ? 2 * m : 0;
  switch (kind) {
    case PolicyKind::linear:
      return m * n;
    case PolicyKind::mlp:
      return m * n + m + norm;
    case PolicyKind::toeplitz:
      return (m + n - 1) + m + norm;
    case PolicyKind::masked:
      return 3 * m * n + m + norm;
  }
  return 0;
}

std::size_t PolicySpec::param_count() const {
  const auto sizes = layer_sizes();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const bool hidden_norm = layer_norm && l + 2 < sizes.size();
    total += layer_param_count(kind, sizes[l], sizes[l + 1], hidden_norm);
  }
  return total;
}

void PolicySpec::validate() const {
  if (obs_dim < 1 || act_dim < 1) throw std::invalid_argument("PolicySpec: dims < 1");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("PolicySpec: hidden width < 1");
  }
  if (kind != PolicyKind::linear && hidden.empty()) {
    throw std::invalid_argument("PolicySpec: network kinds need hidden layers");
  }
  if (!(action_bound > 0.0)) throw std::invalid_argument("PolicySpec: action_bound <= 0");
  if (!(mask_temperature > 0.0)) {
    throw std::invalid_argument("PolicySpec: mask temperature <= 0");
  }
}

Mat toeplitz_expand(const Vec& first_col, const Vec& first_row_tail) {
  const Eigen::Index m = first_col.size();
  const Eigen::Index n = first_row_tail.size() + 1;
  if (m < 1) throw std::invalid_argument("toeplitz_expand: empty column");
  Mat t(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      t(i, j) = i >= j ? first_col[i - j] : first_row_tail[j - i - 1];
    }
  }
  return t;
}

Mat mask_matrix(const MaskLogits& logits, double alpha) {
  if (logits.active.rows() != logits.pruned.rows() ||
      logits.active.cols() != logits.pruned.cols()) {
    throw std::invalid_argument("mask_matrix: logit shapes differ");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("mask_matrix: alpha <= 0");
  // softmax over (active, pruned) == logistic of the scaled difference.
  const Mat diff = (logits.active - logits.pruned) / alpha;
  return diff.unaryExpr([](double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  });
}

Vec masked_forward(const Mat& weights, const MaskLogits& logits, double alpha,
                   const Vec& x) {
  const Mat mask = mask_matrix(logits, alpha);
  if (mask.rows() != weights.rows() || mask.cols() != weights.cols() ||
      x.size() != weights.cols()) {
    throw std::invalid_argument("masked_forward: shape mismatch");
  }
  return weights.cwiseProduct(mask) * x;
}

double mask_usage(const MaskLogits& logits, double alpha) {
  return mask_matrix(logits, alpha).mean();
}

namespace {

// Walks the flat parameter layout layer by layer.
template <typename Visitor>
void for_each_layer(const PolicySpec& spec, const ParamVector& theta, Visitor&& visit) {
  if (static_cast<std::size_t>(theta.size()) != spec.param_count()) {
    throw std::invalid_argument("policy: parameter vector length mismatch");
  }
  const auto sizes = spec.layer_sizes();
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const bool hidden_norm = spec.layer_norm && l + 2 < sizes.size();
    const std::size_t count = layer_param_count(spec.kind, sizes[l], sizes[l + 1], hidden_norm);
    visit(l, sizes[l], sizes[l + 1], hidden_norm, theta.segment(pos, count));
    pos += count;
  }
}

}  // namespace

double policy_mask_usage(const PolicySpec& spec, const ParamVector& theta) {
  if (spec.kind != PolicyKind::masked) return 1.0;
  double active = 0.0;
  double total = 0.0;
  for_each_layer(spec, theta, [&](std::size_t, int in, int out, bool, const auto& p) {
    const Eigen::Index mn = static_cast<Eigen::Index>(in) * out;
    const Eigen::Index off = mn + out;
    MaskLogits logits{Eigen::Map<const RowMat>(p.data() + off, out, in),
                      Eigen::Map<const RowMat>(p.data() + off + mn, out, in)};
    active += mask_matrix(logits, spec.mask_temperature).sum();
    total += static_cast<double>(mn);
  });
  return active / total;
}

ParamVector init_policy_params(const PolicySpec& spec, RngStream& stream) {
  spec.validate();
  ParamVector theta = ParamVector::Zero(static_cast<Eigen::Index>(spec.param_count()));
  if (spec.kind == PolicyKind::linear) return theta;
  const auto sizes = spec.layer_sizes();
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const bool hidden_norm = spec.layer_norm && l + 2 < sizes.size();
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const std::size_t weights = spec.kind == PolicyKind::toeplitz
                                    ? static_cast<std::size_t>(in + out - 1)
                                    : static_cast<std::size_t>(in) * out;
    for (std::size_t i = 0; i < weights + out; ++i) {
      theta[pos + i] = stream.uniform(-bound, bound);
    }
    std::size_t cursor = pos + weights + out;
    if (spec.kind == PolicyKind::masked) {
      const std::size_t mn = static_cast<std::size_t>(in) * out;
      // Active logits lead by 0.1: every edge starts switched on.
      theta.segment(cursor, mn).setConstant(0.1);
      cursor += 2 * mn;
    }
    if (hidden_norm) theta.segment(cursor, out).setOnes();
    pos += layer_param_count(spec.kind, in, out, hidden_norm);
  }
  return theta;
}

CompiledPolicy::CompiledPolicy(const PolicySpec& spec, const ParamVector& theta)
    : spec_(spec) {
  for_each_layer(spec, theta, [&](std::size_t, int in, int out, bool norm, const auto& p) {
    Layer layer;
    std::size_t pos = 0;
    switch (spec.kind) {
      case PolicyKind::linear:
        layer.weight = Eigen::Map<const RowMat>(p.data(), out, in);
        layer.bias = Vec::Zero(out);
        pos = static_cast<std::size_t>(in) * out;
        break;
      case PolicyKind::mlp:
        layer.weight = Eigen::Map<const RowMat>(p.data(), out, in);
        layer.bias = p.segment(static_cast<Eigen::Index>(in) * out, out);
        pos = static_cast<std::size_t>(in) * out + out;
        break;
      case PolicyKind::toeplitz:
        layer.weight = toeplitz_expand(p.segment(0, out), p.segment(out, in - 1));
        layer.bias = p.segment(out + in - 1, out);
        pos = static_cast<std::size_t>(out + in - 1 + out);
        break;
      case PolicyKind::masked: {
        const Eigen::Index mn = static_cast<Eigen::Index>(in) * out;
        const Eigen::Map<const RowMat> w(p.data(), out, in);
        MaskLogits logits{Eigen::Map<const RowMat>(p.data() + mn + out, out, in),
                          Eigen::Map<const RowMat>(p.data() + 2 * mn + out, out, in)};
        layer.weight = w.cwiseProduct(mask_matrix(logits, spec.mask_temperature));
        layer.bias = p.segment(mn, out);
        pos = static_cast<std::size_t>(3 * mn + out);
        break;
      }
    }
    if (norm) {
      layer.norm = true;
      layer.gain = p.segment(pos, out);
      layer.shift = p.segment(pos + out, out);
    }
    layers_.push_back(std::move(layer));
  });
}

Vec CompiledPolicy::pre_squash(const Vec& obs) const {
  if (obs.size() != spec_.obs_dim) {
    throw std::invalid_argument("policy_act: observation dimension mismatch");
  }
  Vec a = obs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vec z = layers_[l].weight * a + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      if (layers_[l].norm) z = layer_norm(z, layers_[l].gain, layers_[l].shift);
      a = z.array().tanh();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Vec CompiledPolicy::act(const Vec& obs) const {
  Vec z = pre_squash(obs);
  if (spec_.output == OutputSquash::tanh) {
    return spec_.action_bound * z.array().tanh();
  }
  return z;
}

Vec policy_act(const PolicySpec& spec, const ParamVector& theta, const Vec& obs) {
  return CompiledPolicy(spec, theta).act(obs);
}

}  // namespace zoac
