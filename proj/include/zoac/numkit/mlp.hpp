#ifndef ZOAC_NUMKIT_MLP_HPP_
#define ZOAC_NUMKIT_MLP_HPP_

#include <cstddef>
#include <vector>

#include "zoac/numkit/rng.hpp"
#include "zoac/types.hpp"

namespace zoac {

inline constexpr double kLayerNormFloor = 1e-8;

// Normalizes x to zero mean / unit population variance, then applies
// gain * y + bias. The standard deviation is floored at kLayerNormFloor, so a
// constant input maps to `bias`.
Vec layer_norm(const Vec& x, const Vec& gain, const Vec& bias);

struct MlpLayout {
  // Input width, hidden widths..., output width.
  std::vector<int> sizes;
  // Layer normalization (with gain/bias) before every hidden tanh.
  bool layer_norm = false;
  // Hidden activation; identity is only useful for tests.
  bool tanh_hidden = true;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  std::size_t num_layers() const { return sizes.size() - 1; }
  std::size_t param_count() const;
};

// Fully connected network stored as one flat parameter vector.
//
// Per layer l (in -> out) the flat layout is: W (out x in, row-major),
// b (out), and for hidden layers with layer norm: gain (out), shift (out).
class Mlp {
 public:
  struct Trace {
    std::vector<Mat> inputs;   // activation entering each layer
    std::vector<Mat> normed;   // layer-norm output before gain/shift
    std::vector<Vec> inv_std;  // 1 / floored std per column
    std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> floored;
    std::vector<Mat> outputs;  // activation leaving each layer
  };

  Mlp() = default;
  Mlp(MlpLayout layout, Vec params);
  static Mlp zeros(const MlpLayout& layout);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; layer-norm
  // gains start at one. The output layer is scaled by `output_scale`.
  static Mlp init(const MlpLayout& layout, RngStream& stream,
                  double output_scale = 1.0);

  const MlpLayout& layout() const { return layout_; }
  const Vec& params() const { return params_; }
  Vec& params() { return params_; }

  // Columns of x are samples.
  Mat forward(const Mat& x, Trace* trace = nullptr) const;
  Vec forward_one(const Vec& x) const;
  // Gradient of sum_{columns} <output_grad, output> w.r.t. the flat params.
  Vec backward(const Trace& trace, const Mat& output_grad) const;

  Eigen::Map<const RowMat> weight(std::size_t layer) const;
  Eigen::Map<const Vec> bias(std::size_t layer) const;

 private:
  struct Offsets {
    std::size_t w, b, gain, shift;
    bool has_norm;
  };
  std::vector<Offsets> offsets_;
  MlpLayout layout_;
  Vec params_;

  void build_offsets();
};

}  // namespace zoac

#endif  // ZOAC_NUMKIT_MLP_HPP_
