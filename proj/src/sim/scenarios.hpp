#ifndef FB_SIM_SCENARIOS_HPP
#define FB_SIM_SCENARIOS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/model_spec.hpp"
#include "sim/random_spline.hpp"

namespace fb {

enum class ScenarioModel { Continuous, Categorical, Application };

ScenarioModel scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioModel model);

// The tau^2 implied by requiring Var(exp(Z)) = scale for Z ~ N(0, tau^2);
// puts the log-scale effect variance on the response-sd scale.
double tau_squared(double scale_sigma);

struct TruthEffect {
  int q = 0;
  std::string label;
  TermKind kind = TermKind::FunctionalIntercept;
  std::vector<std::string> covariates;
  Eigen::MatrixXd on_data;  // N x G evaluation on the drawn covariates
  // Evaluate at covariate coordinates c (empty for intercepts, level code
  // for group effects, one or two values for smooth effects) and time t.
  // Null for the application scenario's fitted truth.
  std::function<double(const Eigen::VectorXd& c, double t)> eval;
};

struct ScenarioTruth {
  std::string family_id;
  DependencyLevel level = DependencyLevel::Independent;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> predictors;  // per q, link scale
  std::vector<Eigen::MatrixXd> parameters;  // per q, parameter scale
  std::vector<TruthEffect> effects;
};

struct ScenarioResult {
  FunctionalDataset data;
  ScenarioTruth truth;
};

ScenarioResult generate_scenario(ScenarioModel model, int n_curves,
                                 int grid_size, DependencyLevel level,
                                 double scale_mu, double scale_sigma,
                                 std::uint64_t seed);

// Fitting-side model specification matching a scenario's structure.
ModelSpec scenario_model_spec(ScenarioModel model);

// True effect values on a lattice (rows = covariate coordinates).
Eigen::MatrixXd truth_on_lattice(const TruthEffect& effect,
                                 const std::vector<Eigen::VectorXd>& rows,
                                 const Grid& t_grid);

}  // namespace fb

#endif
