#ifndef FB_BASIS_CALIBRATE_HPP
#define FB_BASIS_CALIBRATE_HPP

#include <Eigen/Dense>

namespace fb {

// trace(B (B'B + lambda P)^-1 B') = trace((B'B + lambda P)^-1 B'B).
double hat_trace(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& penalty,
                 double lambda);

// Numeric rank of a symmetric PSD matrix.
int numeric_rank_sym(const Eigen::MatrixXd& M, double rel_tol = 1e-10);

// Smoothing parameter such that the hat-matrix trace equals df, found by
// bisection on log(lambda) over [-30, 30] (bounds expanded if needed).
// Throws InfeasibleDfError if df is outside (nullspace dim, rank].
double df_to_lambda(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& penalty,
                    double df, double tol = 1e-6, int max_iter = 200);

}  // namespace fb

#endif
