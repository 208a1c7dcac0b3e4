#include "basis/tensor.hpp"

namespace fb {

Eigen::MatrixXd row_tensor(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows()) {
    throw DimensionError("row_tensor: row counts differ (" +
                         std::to_string(A.rows()) + " vs " +
                         std::to_string(B.rows()) + ")");
  }
  const long n = A.rows(), m = A.cols(), r = B.cols();
  Eigen::MatrixXd out(n, m * r);
  for (long j = 0; j < m; ++j) {
    out.middleCols(j * r, r) = B.array().colwise() * A.col(j).array();
  }
  return out;
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (long i = 0; i < A.rows(); ++i) {
    for (long j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

Eigen::MatrixXd kronecker_design(const Eigen::MatrixXd& Bx,
                                 const Eigen::MatrixXd& By) {
  const long n = Bx.rows(), g = By.rows();
  const long kx = Bx.cols(), ky = By.cols();
  Eigen::MatrixXd out(n * g, kx * ky);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < kx; ++j) {
      out.block(i * g, j * ky, g, ky) = Bx(i, j) * By;
    }
  }
  return out;
}

OrthogonalizeResult orthogonalize(const Eigen::MatrixXd& B_full,
                                  const Eigen::MatrixXd& constraints) {
  const long K = B_full.cols();
  Eigen::MatrixXd cross = B_full.transpose() * constraints;  // K x C

  // Numeric rank and pruning of dependent constraint columns.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted(cross);
  const double max_abs = cross.cwiseAbs().maxCoeff();
  pivoted.setThreshold(1e-12 * std::max(1.0, max_abs));
  const long rank = (max_abs == 0.0) ? 0 : pivoted.rank();

  OrthogonalizeResult res;
  if (rank == 0) {
    res.Z = Eigen::MatrixXd::Identity(K, K);
    res.B = B_full;
    return res;
  }
  if (rank >= K) {
    throw EmptyBasisError("constraints span the whole basis (rank " +
                          std::to_string(rank) + " >= K " + std::to_string(K) +
                          ")");
  }

  Eigen::MatrixXd kept(K, rank);
  const auto& perm = pivoted.colsPermutation().indices();
  for (long c = 0; c < rank; ++c) kept.col(c) = cross.col(perm[c]);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kept);
  Eigen::MatrixXd Q = qr.householderQ();  // K x K
  res.Z = Q.rightCols(K - rank);
  res.B = B_full * res.Z;
  return res;
}

}  // namespace fb
