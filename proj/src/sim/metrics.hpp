#ifndef FB_SIM_METRICS_HPP
#define FB_SIM_METRICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "family/family.hpp"

namespace fb {

// Mean pointwise Kullback-Leibler divergence over all N*G cells.
double mean_kld(const Family& family,
                const std::vector<Eigen::MatrixXd>& theta_true,
                const std::vector<Eigen::MatrixXd>& theta_est);

// RMSE over grid cells of an effect surface.
double effect_rmse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est);

// RMSE normalized by the range of the true surface; constant truth throws
// RangeZeroError (the relative error is then undefined).
double effect_relrmse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est);

}  // namespace fb

#endif
