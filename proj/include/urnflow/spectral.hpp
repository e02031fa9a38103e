#pragma once

#include <vector>

#include "urnflow/types.hpp"

namespace urnflow {

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, run
/// until the off-diagonal Frobenius norm is at most `offdiag_tol` (relative
/// to max(1, |S|_F)). Returned in ascending order.
std::vector<double> jacobi_eigenvalues(Matrix s, double offdiag_tol = 1e-12, int max_sweeps = 100);

}  // namespace urnflow
