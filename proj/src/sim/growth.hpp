#ifndef FB_SIM_GROWTH_HPP
#define FB_SIM_GROWTH_HPP

#include <Eigen/Dense>
#include <map>
#include <string>

#include "core/dataset.hpp"

namespace fb {

enum class GrowthModel { BaranyiRoberts, Gompertz, WeberSigmoid, Logistic };

GrowthModel growth_model_from_name(const std::string& name);

// Pointwise evaluation of classic parametric growth curves, used as test
// fixtures. Parameter keys:
//   baranyi_roberts, gompertz: y0, y_inf, mu_max, lag
//   weber_sigmoid:             a, b, c, d, y0
//   logistic:                  y0, y_inf, r
Eigen::VectorXd parametric_growth_curve(
    GrowthModel model, const std::map<std::string, double>& params,
    const Grid& t_grid);

}  // namespace fb

#endif
