#include "zoac/evaluation/critic.hpp"

namespace zoac {

Vec FunctionValue::values(const Mat& obs) const {
  Vec out(obs.cols());
  for (Eigen::Index c = 0; c < obs.cols(); ++c) out[c] = fn_(obs.col(c));
  return out;
}

CriticNet::CriticNet(int obs_dim, const CriticConfig& config, RngStream& init_stream)
    : gamma_(config.gamma), lambda_(config.lambda) {
  MlpLayout layout;
  layout.sizes.push_back(obs_dim);
  layout.sizes.insert(layout.sizes.end(), config.hidden.begin(), config.hidden.end());
  layout.sizes.push_back(1);
  mlp_ = Mlp::init(layout, init_stream);
  adam_ = AdamState::zeros(mlp_.params().size(), config.lr);
}

CriticNet::CriticNet(Mlp mlp, AdamState adam, double gamma, double lambda)
    : mlp_(std::move(mlp)), adam_(std::move(adam)), gamma_(gamma), lambda_(lambda) {}

Vec CriticNet::values(const Mat& obs) const { return mlp_.forward(obs).row(0).transpose(); }

}  // namespace zoac
