#pragma once

#include <Eigen/Dense>

namespace urnflow {

/// A point of R^m indexed by vertex; simplex points are the common case.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace urnflow
