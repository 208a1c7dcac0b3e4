#include "sim/growth.hpp"

#include <cmath>

namespace fb {

namespace {

double get_param(const std::map<std::string, double>& params,
                 const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw DomainError("missing growth parameter '" + key + "'");
  }
  return it->second;
}

}  // namespace

GrowthModel growth_model_from_name(const std::string& name) {
  if (name == "baranyi_roberts") return GrowthModel::BaranyiRoberts;
  if (name == "gompertz") return GrowthModel::Gompertz;
  if (name == "weber_sigmoid") return GrowthModel::WeberSigmoid;
  if (name == "logistic") return GrowthModel::Logistic;
  throw ConfigError("unknown growth model '" + name + "'");
}

Eigen::VectorXd parametric_growth_curve(
    GrowthModel model, const std::map<std::string, double>& params,
    const Grid& t_grid) {
  Eigen::VectorXd y(t_grid.size());
  switch (model) {
    case GrowthModel::BaranyiRoberts: {
      const double y0 = get_param(params, "y0");
      const double yi = get_param(params, "y_inf");
      const double mu = get_param(params, "mu_max");
      const double lag = get_param(params, "lag");
      if (!(mu > 0.0) || lag < 0.0) {
        throw DomainError("baranyi_roberts needs mu_max > 0 and lag >= 0");
      }
      // Common y0 / y_inf / mu_max / lag parameterization in log10 units:
      // starts at y0, saturates at y_inf after a lag phase.
      for (int i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double num = -1.0 + std::exp(mu * lag) + std::exp(mu * t);
        const double den = std::exp(mu * t) - 1.0 +
                           std::exp(mu * lag) * std::pow(10.0, yi - y0);
        y[i] = yi + std::log10(num / den);
      }
      break;
    }
    case GrowthModel::Gompertz: {
      const double y0 = get_param(params, "y0");
      const double yi = get_param(params, "y_inf");
      const double mu = get_param(params, "mu_max");
      const double lag = get_param(params, "lag");
      if (!(mu > 0.0) || !(yi > y0)) {
        throw DomainError("gompertz needs mu_max > 0 and y_inf > y0");
      }
      const double span = yi - y0;
      for (int i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        y[i] = y0 + span * std::exp(-std::exp(mu * std::exp(1.0) *
                                                  (lag - t) /
                                                  (span * std::log(10.0)) +
                                              1.0));
      }
      break;
    }
    case GrowthModel::WeberSigmoid: {
      const double a = get_param(params, "a");
      const double b = get_param(params, "b");
      const double c = get_param(params, "c");
      const double d = get_param(params, "d");
      const double y0 = get_param(params, "y0");
      if (!(c > 0.0)) throw DomainError("weber_sigmoid needs c > 0");
      for (int i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (t < 0.0) throw DomainError("weber_sigmoid needs t >= 0");
        y[i] = a + (y0 - a) / std::pow(1.0 + std::pow(t / c, b), d);
      }
      break;
    }
    case GrowthModel::Logistic: {
      const double y0 = get_param(params, "y0");
      const double yi = get_param(params, "y_inf");
      const double r = get_param(params, "r");
      if (!(y0 > 0.0) || !(yi > 0.0)) {
        throw DomainError("logistic needs y0, y_inf > 0");
      }
      for (int i = 0; i < t_grid.size(); ++i) {
        const double e = std::exp(r * t_grid[i]);
        y[i] = yi * y0 * e / (yi + y0 * (e - 1.0));
      }
      break;
    }
  }
  return y;
}

}  // namespace fb
