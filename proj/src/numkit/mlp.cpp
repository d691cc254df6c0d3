#include "zoac/numkit/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace zoac {

Vec layer_norm(const Vec& x, const Vec& gain, const Vec& bias) {
  if (x.size() != gain.size() || x.size() != bias.size()) {
    throw std::invalid_argument("layer_norm: length mismatch");
  }
  const double mu = x.mean();
  const Vec centered = x.array() - mu;
  const double var = centered.squaredNorm() / static_cast<double>(x.size());
  const double s = std::max(std::sqrt(var), kLayerNormFloor);
  return gain.cwiseProduct(centered / s) + bias;
}

std::size_t MlpLayout::param_count() const {
  if (sizes.size() < 2) return 0;
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(sizes[l]);
    const auto out = static_cast<std::size_t>(sizes[l + 1]);
    total += out * in + out;
    if (layer_norm && l + 2 < sizes.size()) total += 2 * out;
  }
  return total;
}

Mlp::Mlp(MlpLayout layout, Vec params)
    : layout_(std::move(layout)), params_(std::move(params)) {
  if (layout_.sizes.size() < 2) {
    throw std::invalid_argument("Mlp: need at least input and output width");
  }
  for (int s : layout_.sizes) {
    if (s < 1) throw std::invalid_argument("Mlp: layer widths must be >= 1");
  }
  if (static_cast<std::size_t>(params_.size()) != layout_.param_count()) {
    throw std::invalid_argument("Mlp: parameter vector length mismatch");
  }
  build_offsets();
}

Mlp Mlp::zeros(const MlpLayout& layout) {
  return Mlp(layout, Vec::Zero(static_cast<Eigen::Index>(layout.param_count())));
}

Mlp Mlp::init(const MlpLayout& layout, RngStream& stream, double output_scale) {
  Mlp net = zeros(layout);
  const std::size_t last = layout.num_layers() - 1;
  for (std::size_t l = 0; l < layout.num_layers(); ++l) {
    const Offsets& o = net.offsets_[l];
    const int in = layout.sizes[l];
    const int out = layout.sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const double scale = l == last ? output_scale : 1.0;
    for (int i = 0; i < out * in; ++i) {
      net.params_[o.w + i] = scale * stream.uniform(-bound, bound);
    }
    for (int i = 0; i < out; ++i) {
      net.params_[o.b + i] = scale * stream.uniform(-bound, bound);
    }
    if (o.has_norm) {
      net.params_.segment(o.gain, out).setOnes();
    }
  }
  return net;
}

void Mlp::build_offsets() {
  offsets_.clear();
  std::size_t pos = 0;
  const std::size_t layers = layout_.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(layout_.sizes[l]);
    const auto out = static_cast<std::size_t>(layout_.sizes[l + 1]);
    Offsets o{};
    o.w = pos;
    pos += out * in;
    o.b = pos;
    pos += out;
    o.has_norm = layout_.layer_norm && l + 1 < layers;
    if (o.has_norm) {
      o.gain = pos;
      pos += out;
      o.shift = pos;
      pos += out;
    }
    offsets_.push_back(o);
  }
}

Eigen::Map<const RowMat> Mlp::weight(std::size_t layer) const {
  return {params_.data() + offsets_[layer].w, layout_.sizes[layer + 1],
          layout_.sizes[layer]};
}

Eigen::Map<const Vec> Mlp::bias(std::size_t layer) const {
  return {params_.data() + offsets_[layer].b, layout_.sizes[layer + 1]};
}

Mat Mlp::forward(const Mat& x, Trace* trace) const {
  if (x.rows() != layout_.input_dim()) {
    throw std::invalid_argument("Mlp::forward: input width mismatch");
  }
  const std::size_t layers = layout_.num_layers();
  if (trace != nullptr) {
    *trace = Trace{};
    trace->inputs.reserve(layers);
    trace->outputs.reserve(layers);
  }
  Mat a = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const Offsets& o = offsets_[l];
    const int out = layout_.sizes[l + 1];
    Mat z = weight(l) * a;
    z.colwise() += bias(l);
    if (trace != nullptr) trace->inputs.push_back(a);

    const bool hidden = l + 1 < layers;
    Mat normed;
    Vec inv_std;
    Eigen::Array<bool, Eigen::Dynamic, 1> floored;
    if (hidden && o.has_norm) {
      const Eigen::Map<const Vec> gain(params_.data() + o.gain, out);
      const Eigen::Map<const Vec> shift(params_.data() + o.shift, out);
      normed.resize(z.rows(), z.cols());
      inv_std.resize(z.cols());
      floored.resize(z.cols());
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double mu = z.col(c).mean();
        normed.col(c) = z.col(c).array() - mu;
        const double var = normed.col(c).squaredNorm() / static_cast<double>(out);
        const double sd = std::sqrt(var);
        floored[c] = sd < kLayerNormFloor;
        inv_std[c] = 1.0 / std::max(sd, kLayerNormFloor);
        normed.col(c) *= inv_std[c];
      }
      z = (normed.array().colwise() * gain.array()).matrix();
      z.colwise() += shift;
    }
    if (hidden && layout_.tanh_hidden) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
    if (trace != nullptr) {
      trace->normed.push_back(std::move(normed));
      trace->inv_std.push_back(std::move(inv_std));
      trace->floored.push_back(std::move(floored));
      trace->outputs.push_back(a);
    }
  }
  return a;
}

Vec Mlp::forward_one(const Vec& x) const { return forward(x).col(0); }

Vec Mlp::backward(const Trace& trace, const Mat& output_grad) const {
  const std::size_t layers = layout_.num_layers();
  if (trace.inputs.size() != layers) {
    throw std::invalid_argument("Mlp::backward: trace does not match network");
  }
  if (output_grad.rows() != layout_.output_dim() ||
      output_grad.cols() != trace.outputs.back().cols()) {
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
  }
  Vec grad = Vec::Zero(params_.size());
  Mat da = output_grad;
  for (std::size_t l = layers; l-- > 0;) {
    const Offsets& o = offsets_[l];
    const int in = layout_.sizes[l];
    const int out = layout_.sizes[l + 1];
    const bool hidden = l + 1 < layers;
    Mat dz;
    if (hidden) {
      Mat dh = layout_.tanh_hidden
                   ? Mat(da.array() * (1.0 - trace.outputs[l].array().square()))
                   : da;
      if (o.has_norm) {
        const Mat& y = trace.normed[l];
        const Eigen::Map<const Vec> gain(params_.data() + o.gain, out);
        grad.segment(o.gain, out) += (dh.array() * y.array()).rowwise().sum().matrix();
        grad.segment(o.shift, out) += dh.rowwise().sum();
        const Mat dy = (dh.array().colwise() * gain.array()).matrix();
        dz.resize(dy.rows(), dy.cols());
        for (Eigen::Index c = 0; c < dy.cols(); ++c) {
          const double mean_dy = dy.col(c).mean();
          if (trace.floored[l][c]) {
            dz.col(c) = (dy.col(c).array() - mean_dy) * trace.inv_std[l][c];
          } else {
            const double mean_dyy = dy.col(c).dot(y.col(c)) / static_cast<double>(out);
            dz.col(c) = (dy.col(c).array() - mean_dy - y.col(c).array() * mean_dyy) *
                        trace.inv_std[l][c];
          }
        }
      } else {
        dz = std::move(dh);
      }
    } else {
      dz = da;
    }
    Eigen::Map<RowMat> dw(grad.data() + o.w, out, in);
    dw.noalias() += dz * trace.inputs[l].transpose();
    grad.segment(o.b, out) += dz.rowwise().sum();
    if (l > 0) da = weight(l).transpose() * dz;
  }
  return grad;
}

}  // namespace zoac
