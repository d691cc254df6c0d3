#ifndef ZOAC_NUMKIT_RUNNING_STAT_HPP_
#define ZOAC_NUMKIT_RUNNING_STAT_HPP_

#include <cstdint>

#include "zoac/types.hpp"

namespace zoac {

// Per-coordinate running mean and population variance (Welford / Chan).
class RunningStat {
 public:
  static constexpr double kStdFloor = 1e-8;

  RunningStat() = default;
  explicit RunningStat(Eigen::Index dim);
  RunningStat(std::int64_t count, Vec mean, Vec m2);

  // Rows of `batch` are samples. An empty batch is a no-op.
  void update(const Mat& batch);
  void update(const Vec& sample);
  void merge(const RunningStat& other);

  Eigen::Index dim() const { return mean_.size(); }
  std::int64_t count() const { return count_; }
  const Vec& mean() const { return mean_; }
  const Vec& m2() const { return m2_; }
  Vec variance() const;
  // max(std, floor); all ones while fewer than two samples have been seen.
  Vec stddev() const;
  Vec normalize(const Vec& x) const;

 private:
  std::int64_t count_ = 0;
  Vec mean_;
  Vec m2_;
};

// Observation filter: a RunningStat that can be switched off (identity).
struct ObsNormalizer {
  RunningStat stat;
  bool enabled = true;

  Vec operator()(const Vec& x) const { return enabled ? stat.normalize(x) : x; }
};

}  // namespace zoac

#endif  // ZOAC_NUMKIT_RUNNING_STAT_HPP_
