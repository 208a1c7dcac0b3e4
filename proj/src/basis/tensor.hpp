#ifndef FB_BASIS_TENSOR_HPP
#define FB_BASIS_TENSOR_HPP

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace fb {

// Row tensor product: row i of the result is a_i (x) b_i.
Eigen::MatrixXd row_tensor(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Kronecker product A (x) B.
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Design for N curves on a common grid: equals row_tensor applied to the
// expanded (N*G)-row marginal matrices; rows ordered curve-major
// (curve 0 at all grid points, then curve 1, ...).
Eigen::MatrixXd kronecker_design(const Eigen::MatrixXd& Bx,
                                 const Eigen::MatrixXd& By);

// Orthogonalization against constraints: returns Z (K x (K-r)) with
// orthonormal columns spanning the null space of constraints^T * B_full and
// the transformed basis B = B_full * Z. Rank-deficient constraint matrices
// are column-pruned by pivoted QR first.
struct OrthogonalizeResult {
  Eigen::MatrixXd Z;
  Eigen::MatrixXd B;
};

OrthogonalizeResult orthogonalize(const Eigen::MatrixXd& B_full,
                                  const Eigen::MatrixXd& constraints);

}  // namespace fb

#endif
