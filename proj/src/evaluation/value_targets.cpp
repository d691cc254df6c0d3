#include "zoac/evaluation/value_targets.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace zoac {

SegmentValues evaluate_segment_values(const IterationBatch& batch, const StateValue& value) {
  SegmentValues out;
  out.reserve(batch.segments.size());
  for (const Segment& seg : batch.segments) {
    if (seg.observations.empty()) {
      out.emplace_back();
      continue;
    }
    Mat obs(seg.observations.front().size(), static_cast<Eigen::Index>(seg.observations.size()));
    for (std::size_t k = 0; k < seg.observations.size(); ++k) {
      obs.col(static_cast<Eigen::Index>(k)) = seg.observations[k];
    }
    Vec v = value.values(obs);
    if (seg.terminal) v[v.size() - 1] = 0.0;
    out.push_back(std::move(v));
  }
  return out;
}

ValueTargetSet compute_value_targets(const IterationBatch& batch, const SegmentValues& values,
                                     double gamma, double lambda) {
  if (values.size() != batch.segments.size()) {
    throw std::invalid_argument("compute_value_targets: values do not match batch");
  }
  const std::size_t total = batch.transitions();
  ValueTargetSet out;
  out.targets.resize(static_cast<Eigen::Index>(total));
  if (total > 0) {
    out.observations.resize(batch.segments.front().observations.front().size(),
                            static_cast<Eigen::Index>(total));
  }
  // Column offset of each segment's first state in the output.
  std::vector<std::size_t> offset(batch.segments.size() + 1, 0);
  for (std::size_t s = 0; s < batch.segments.size(); ++s) {
    offset[s + 1] = offset[s] + batch.segments[s].length();
  }

  const double gl = gamma * lambda;
  for (const Fragment& frag : batch.fragments()) {
    // The fragment's bootstrap is the last segment's final value entry; each
    // earlier segment's final entry equals the next segment's first one.
    double next_adv = 0.0;
    for (std::size_t s = frag.last + 1; s-- > frag.first;) {
      const Segment& seg = batch.segments[s];
      const Vec& v = values[s];
      for (std::size_t k = seg.length(); k-- > 0;) {
        const double delta = seg.rewards[k] + gamma * v[k + 1] - v[k];
        next_adv = delta + gl * next_adv;
        const auto col = static_cast<Eigen::Index>(offset[s] + k);
        out.targets[col] = v[k] + next_adv;
        out.observations.col(col) = seg.observations[k];
      }
    }
  }
  return out;
}

ValueTargetSet compute_value_targets(const IterationBatch& batch, const StateValue& value,
                                     double gamma, double lambda) {
  return compute_value_targets(batch, evaluate_segment_values(batch, value), gamma, lambda);
}

CriticUpdateResult critic_update(CriticNet& critic, const ValueTargetSet& targets,
                                 std::size_t batch_size, std::size_t epochs, RngStream& stream) {
  if (targets.size() == 0) throw std::invalid_argument("critic_update: no targets");
  if (batch_size == 0) throw std::invalid_argument("critic_update: batch size 0");
  const std::size_t n = targets.size();
  std::vector<std::size_t> order(n);
  CriticUpdateResult result;
  Mlp::Trace trace;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[stream.uniform_index(i + 1)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t len = std::min(batch_size, n - start);
      Mat x(targets.observations.rows(), static_cast<Eigen::Index>(len));
      Vec g(static_cast<Eigen::Index>(len));
      for (std::size_t b = 0; b < len; ++b) {
        x.col(static_cast<Eigen::Index>(b)) =
            targets.observations.col(static_cast<Eigen::Index>(order[start + b]));
        g[static_cast<Eigen::Index>(b)] = targets.targets[static_cast<Eigen::Index>(order[start + b])];
      }
      const Mat out = critic.mlp().forward(x, &trace);
      const Vec err = out.row(0).transpose() - g;
      loss_sum += 0.5 * err.squaredNorm();
      const Mat dout = err.transpose() / static_cast<double>(len);
      const Vec grad = critic.mlp().backward(trace, dout);
      adam_step(critic.adam(), critic.mlp().params(), grad);
      ++result.steps;
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
  return result;
}

}  // namespace zoac
