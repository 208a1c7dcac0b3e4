#include "sim/metrics.hpp"

#include <cmath>

namespace fb {

double mean_kld(const Family& family,
                const std::vector<Eigen::MatrixXd>& theta_true,
                const std::vector<Eigen::MatrixXd>& theta_est) {
  const int Q = family.n_parameters();
  if (static_cast<int>(theta_true.size()) != Q ||
      static_cast<int>(theta_est.size()) != Q) {
    throw DimensionError("mean_kld: parameter surfaces do not match family");
  }
  const long n = theta_true[0].rows(), g = theta_true[0].cols();
  for (int q = 0; q < Q; ++q) {
    if (theta_true[static_cast<size_t>(q)].rows() != n ||
        theta_true[static_cast<size_t>(q)].cols() != g ||
        theta_est[static_cast<size_t>(q)].rows() != n ||
        theta_est[static_cast<size_t>(q)].cols() != g) {
      throw DimensionError("mean_kld: surface shape mismatch");
    }
  }
  Eigen::VectorXd t(Q), e(Q);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long c = 0; c < g; ++c) {
      for (int q = 0; q < Q; ++q) {
        t[q] = theta_true[static_cast<size_t>(q)](i, c);
        e[q] = theta_est[static_cast<size_t>(q)](i, c);
      }
      sum += family.kld(t, e);
    }
  }
  return sum / static_cast<double>(n * g);
}

double effect_rmse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols()) {
    throw DimensionError("effect_rmse: shape mismatch");
  }
  return std::sqrt((est - truth).squaredNorm() /
                   static_cast<double>(truth.size()));
}

double effect_relrmse(const Eigen::MatrixXd& truth,
                      const Eigen::MatrixXd& est) {
  const double range = truth.maxCoeff() - truth.minCoeff();
  if (!(range > 0.0)) {
    throw RangeZeroError("relative RMSE undefined for a constant true effect");
  }
  return effect_rmse(truth, est) / range;
}

}  // namespace fb
