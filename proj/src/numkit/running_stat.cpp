#include "zoac/numkit/running_stat.hpp"

#include <stdexcept>

namespace zoac {

RunningStat::RunningStat(Eigen::Index dim)
    : mean_(Vec::Zero(dim)), m2_(Vec::Zero(dim)) {}

RunningStat::RunningStat(std::int64_t count, Vec mean, Vec m2)
    : count_(count), mean_(std::move(mean)), m2_(std::move(m2)) {
  if (count_ < 0 || mean_.size() != m2_.size()) {
    throw std::invalid_argument("RunningStat: inconsistent state");
  }
}

void RunningStat::update(const Mat& batch) {
  if (batch.rows() == 0) return;
  if (batch.cols() != dim()) {
    throw std::invalid_argument("RunningStat::update: dimension mismatch");
  }
  // Two-pass statistics of the batch, then a pairwise merge.
  const Vec bmean = batch.colwise().mean().transpose();
  const Vec bm2 =
      (batch.rowwise() - bmean.transpose()).array().square().colwise().sum().transpose();
  merge(RunningStat(batch.rows(), bmean, bm2));
}

void RunningStat::update(const Vec& sample) {
  update(Mat(sample.transpose()));
}

void RunningStat::merge(const RunningStat& other) {
  if (other.count_ == 0) return;
  if (other.dim() != dim()) {
    throw std::invalid_argument("RunningStat::merge: dimension mismatch");
  }
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Vec delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta.cwiseProduct(delta) * (na * nb / n);
  count_ += other.count_;
}

Vec RunningStat::variance() const {
  if (count_ == 0) return Vec::Zero(dim());
  return m2_ / static_cast<double>(count_);
}

Vec RunningStat::stddev() const {
  if (count_ < 2) return Vec::Ones(dim());
  return variance().cwiseSqrt().cwiseMax(kStdFloor);
}

Vec RunningStat::normalize(const Vec& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("RunningStat::normalize: dimension mismatch");
  }
  return (x - mean_).cwiseQuotient(stddev());
}

}  // namespace zoac
