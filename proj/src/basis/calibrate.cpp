#include "basis/calibrate.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace fb {

double hat_trace(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& penalty,
                 double lambda) {
  Eigen::MatrixXd M = BtB + lambda * penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success) {
    // Rank-deficient probe (e.g. near-zero design columns at tiny lambda):
    // stabilize with a ridge that is negligible for identified directions and
    // zeroes the unidentified ones' contribution to the trace.
    const double jitter = 1e-10 * std::max(M.diagonal().maxCoeff(), 1e-300);
    M.diagonal().array() += jitter;
    ldlt.compute(M);
    if (ldlt.info() != Eigen::Success) {
      throw SingularSystemError("penalized normal matrix not factorizable");
    }
  }
  return ldlt.solve(BtB).trace();
}

int numeric_rank_sym(const Eigen::MatrixXd& M, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double cutoff = rel_tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  int rank = 0;
  for (long i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) ++rank;
  }
  return rank;
}

double df_to_lambda(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& penalty,
                    double df, double tol, int max_iter) {
  const int rank = numeric_rank_sym(BtB);
  const int K = static_cast<int>(BtB.rows());
  const int null_dim = K - numeric_rank_sym(penalty);

  if (df > rank + tol || df <= null_dim) {
    throw InfeasibleDfError("df " + std::to_string(df) + " outside (" +
                            std::to_string(null_dim) + ", " +
                            std::to_string(rank) + "]");
  }
  if (df >= rank - tol) return 0.0;

  double lo = -30.0, hi = 30.0;  // log lambda
  double f_lo = hat_trace(BtB, penalty, std::exp(lo));
  double f_hi = hat_trace(BtB, penalty, std::exp(hi));
  // df(lambda) is decreasing; expand bounds until the target is bracketed.
  int expand = 0;
  while (f_lo < df && expand < 20) {
    lo -= 10.0;
    f_lo = hat_trace(BtB, penalty, std::exp(lo));
    ++expand;
  }
  while (f_hi > df && expand < 40) {
    hi += 10.0;
    f_hi = hat_trace(BtB, penalty, std::exp(hi));
    ++expand;
  }
  if (f_lo < df) return 0.0;  // even tiny lambda over-smooths: unpenalized fit
  if (f_hi > df) {
    throw InfeasibleDfError("bisection could not bracket df target " +
                            std::to_string(df));
  }

  double mid = 0.0, f_mid = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    f_mid = hat_trace(BtB, penalty, std::exp(mid));
    if (std::abs(f_mid - df) < tol) return std::exp(mid);
    if (f_mid > df) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(mid);
}

}  // namespace fb
