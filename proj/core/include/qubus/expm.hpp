#pragma once

#include <Eigen/Dense>

namespace qubus {

/// Dense matrix exponential by Pade scaling and squaring (Higham 2005):
/// degree 3/5/7/9/13 chosen from the 1-norm, then repeated squaring.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace qubus
