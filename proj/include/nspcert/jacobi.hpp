#pragma once

#include <Eigen/Dense>

namespace nspcert {

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending. Sweeps stop once the off-diagonal Frobenius norm drops
/// below `tolerance` times the Frobenius norm of the input.
Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a, double tolerance = 1e-13,
                                   int max_sweeps = 100);

}  // namespace nspcert
