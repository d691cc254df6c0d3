#ifndef ZOAC_NUMKIT_ADAM_HPP_
#define ZOAC_NUMKIT_ADAM_HPP_

#include <cstdint>

#include "zoac/types.hpp"

namespace zoac {

struct AdamState {
  Vec m;
  Vec v;
  std::int64_t t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros(Eigen::Index size, double lr);
};

// One bias-corrected Adam step on a minimization problem. Updates `params`
// and `state` in place; throws std::invalid_argument on length mismatch.
void adam_step(AdamState& state, Vec& params, const Vec& grad);

}  // namespace zoac

#endif  // ZOAC_NUMKIT_ADAM_HPP_
