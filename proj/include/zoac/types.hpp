#ifndef ZOAC_TYPES_HPP_
#define ZOAC_TYPES_HPP_

#include <Eigen/Dense>

namespace zoac {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flat policy parameter vector; every zeroth-order routine works on this.
using ParamVector = Vec;

}  // namespace zoac

#endif  // ZOAC_TYPES_HPP_
