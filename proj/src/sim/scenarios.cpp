#include "sim/scenarios.hpp"

#include <cmath>

#include "basis/bspline.hpp"
#include "basis/tensor.hpp"
#include "engine/booster.hpp"
#include "sim/growth.hpp"

namespace fb {

namespace {

// Raw-basis coefficient transform T = Omega * diag(W): coefficients T*zeta
// with zeta ~ N(0, I) give a random spline with the requested mean variance
// and smoothness share over `reference` points.
Eigen::MatrixXd coef_transform(const SplineBasisDef& basis, int diff_order,
                               double scale, double smoothness,
                               const Grid& reference) {
  Eigen::MatrixXd btilde = eval_bspline_basis(basis, reference.as_vector());
  Eigen::MatrixXd omega = build_omega(basis.n_basis, diff_order);
  Eigen::MatrixXd bo = btilde * omega;
  Eigen::VectorXd w = build_weight_matrix(scale, smoothness, bo, diff_order);
  return omega * w.asDiagonal();
}

Eigen::MatrixXd standard_normal_matrix(long rows, long cols,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

constexpr double kEffectSmoothness = 0.8;

TruthEffect intercept_effect(int q, const std::string& label,
                             const SplineBasisDef& tb, double scale,
                             const Grid& grid, int n, std::mt19937_64& rng) {
  Eigen::MatrixXd t_transform =
      coef_transform(tb, 2, scale, kEffectSmoothness, grid);
  Eigen::VectorXd coef = t_transform * standard_normal_matrix(tb.n_basis, 1, rng);
  Eigen::VectorXd curve =
      eval_bspline_basis(tb, grid.as_vector()) * coef;

  TruthEffect e;
  e.q = q;
  e.label = label;
  e.kind = TermKind::FunctionalIntercept;
  e.on_data = curve.transpose().replicate(n, 1);
  e.eval = [tb, coef](const Eigen::VectorXd&, double t) {
    Eigen::VectorXd pt(1);
    pt << t;
    return (eval_bspline_basis(tb, pt) * coef)(0, 0);
  };
  return e;
}

TruthEffect scalar_effect(int q, const std::string& label,
                          const std::string& cov_name,
                          const Eigen::VectorXd& z, const SplineBasisDef& zb,
                          const SplineBasisDef& tb, double scale,
                          const Grid& grid, std::mt19937_64& rng) {
  Grid dense_z = Grid::uniform(zb.a, zb.b, 101);
  Eigen::MatrixXd tz = coef_transform(zb, 2, 1.0, kEffectSmoothness, dense_z);
  Eigen::MatrixXd tt = coef_transform(tb, 2, scale, kEffectSmoothness, grid);
  Eigen::MatrixXd a =
      tz * standard_normal_matrix(zb.n_basis, tb.n_basis, rng) * tt.transpose();

  Eigen::MatrixXd bz = eval_bspline_basis(zb, z);
  Eigen::VectorXd zbar = bz.colwise().mean();  // empirical centering
  Eigen::MatrixXd bt = eval_bspline_basis(tb, grid.as_vector());

  TruthEffect e;
  e.q = q;
  e.label = label;
  e.kind = TermKind::SmoothScalar;
  e.covariates = {cov_name};
  e.on_data = (bz.rowwise() - zbar.transpose()) * a * bt.transpose();
  e.eval = [zb, tb, a, zbar](const Eigen::VectorXd& c, double t) {
    Eigen::VectorXd zp(1), tp(1);
    zp << c[0];
    tp << t;
    Eigen::RowVectorXd bzr = eval_bspline_basis(zb, zp).row(0);
    Eigen::RowVectorXd btr = eval_bspline_basis(tb, tp).row(0);
    return ((bzr - zbar.transpose()) * a * btr.transpose())(0, 0);
  };
  return e;
}

TruthEffect interaction_effect(int q, const std::string& label,
                               const std::string& cov1, const std::string& cov2,
                               const Eigen::VectorXd& z1,
                               const Eigen::VectorXd& z2,
                               const SplineBasisDef& zb,
                               const SplineBasisDef& tb, double scale,
                               const Grid& grid, const TruthEffect& marginal1,
                               const TruthEffect& marginal2,
                               std::mt19937_64& rng) {
  Grid dense_z = Grid::uniform(zb.a, zb.b, 101);
  Eigen::MatrixXd tz = coef_transform(zb, 2, 1.0, kEffectSmoothness, dense_z);
  Eigen::MatrixXd tt = coef_transform(tb, 2, scale, kEffectSmoothness, grid);
  Eigen::MatrixXd a = kronecker(tz, tz) *
                      standard_normal_matrix(zb.n_basis * zb.n_basis,
                                             tb.n_basis, rng) *
                      tt.transpose();

  Eigen::MatrixXd b1 = eval_bspline_basis(zb, z1);
  Eigen::MatrixXd b2 = eval_bspline_basis(zb, z2);
  Eigen::MatrixXd bt = eval_bspline_basis(tb, grid.as_vector());
  Eigen::MatrixXd raw = row_tensor(b1, b2) * a * bt.transpose();  // N x G

  // Orthogonalize each time slice against the intercept and the two
  // marginal effects on the drawn covariates.
  const long n = raw.rows(), g = raw.cols();
  Eigen::MatrixXd beta(g, 3);  // per-t regression coefficients
  Eigen::MatrixXd centered(n, g);
  for (long c = 0; c < g; ++c) {
    Eigen::MatrixXd x(n, 3);
    x.col(0).setOnes();
    x.col(1) = marginal1.on_data.col(c);
    x.col(2) = marginal2.on_data.col(c);
    Eigen::VectorXd b = x.colPivHouseholderQr().solve(raw.col(c));
    beta.row(c) = b.transpose();
    centered.col(c) = raw.col(c) - x * b;
  }

  TruthEffect e;
  e.q = q;
  e.label = label;
  e.kind = TermKind::SmoothInteraction;
  e.covariates = {cov1, cov2};
  e.on_data = centered;
  auto m1 = marginal1.eval;
  auto m2 = marginal2.eval;
  std::vector<double> tpoints = grid.points();
  e.eval = [zb, tb, a, beta, m1, m2, tpoints](const Eigen::VectorXd& c,
                                              double t) {
    Eigen::VectorXd p1(1), p2(1), tp(1);
    p1 << c[0];
    p2 << c[1];
    tp << t;
    Eigen::RowVectorXd row =
        kronecker(eval_bspline_basis(zb, p1).row(0),
                  eval_bspline_basis(zb, p2).row(0));
    const double raw_val =
        (row * a * eval_bspline_basis(tb, tp).row(0).transpose())(0, 0);
    // Orthogonalization coefficients are defined on the response grid.
    long gi = 0;
    for (size_t k = 1; k < tpoints.size(); ++k) {
      if (std::abs(tpoints[k] - t) < std::abs(tpoints[static_cast<size_t>(gi)] - t)) {
        gi = static_cast<long>(k);
      }
    }
    Eigen::VectorXd c1(1), c2(1);
    c1 << c[0];
    c2 << c[1];
    return raw_val - beta(gi, 0) - beta(gi, 1) * m1(c1, t) -
           beta(gi, 2) * m2(c2, t);
  };
  return e;
}

TruthEffect group_effect(int q, const std::string& label,
                         const std::string& cov_name,
                         const std::vector<int>& codes, int n_levels,
                         const SplineBasisDef& tb, double scale,
                         const Grid& grid, std::mt19937_64& rng) {
  Eigen::MatrixXd t_transform =
      coef_transform(tb, 2, scale, kEffectSmoothness, grid);
  Eigen::MatrixXd coefs(tb.n_basis, n_levels);
  for (int l = 0; l < n_levels; ++l) {
    coefs.col(l) = t_transform * standard_normal_matrix(tb.n_basis, 1, rng);
  }
  // Center empirically: the mean over curves of the selected level curve
  // vanishes at every t.
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(n_levels);
  for (int c : codes) freq[c] += 1.0;
  freq /= static_cast<double>(codes.size());
  Eigen::VectorXd mean_coef = coefs * freq;
  coefs.colwise() -= mean_coef;

  Eigen::MatrixXd bt = eval_bspline_basis(tb, grid.as_vector());
  Eigen::MatrixXd level_curves = (bt * coefs).transpose();  // L x G

  TruthEffect e;
  e.q = q;
  e.label = label;
  e.kind = TermKind::GroupIntercept;
  e.covariates = {cov_name};
  e.on_data.resize(static_cast<long>(codes.size()), grid.size());
  for (size_t i = 0; i < codes.size(); ++i) {
    e.on_data.row(static_cast<long>(i)) = level_curves.row(codes[i]);
  }
  e.eval = [tb, coefs](const Eigen::VectorXd& c, double t) {
    Eigen::VectorXd tp(1);
    tp << t;
    const int l = static_cast<int>(c[0]);
    return (eval_bspline_basis(tb, tp) * coefs.col(l))(0, 0);
  };
  return e;
}

ScenarioResult continuous_scenario(int n, int g, DependencyLevel level,
                                   double scale_mu, double scale_sigma,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Grid grid = Grid::uniform(0.0, 10.0, g);
  SplineBasisDef tb(3, 8, 0.0, 10.0);
  SplineBasisDef zb(3, 6, 0.0, 1.0);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd z1(n), z2(n);
  for (int i = 0; i < n; ++i) z1[i] = unif(rng);
  for (int i = 0; i < n; ++i) z2[i] = unif(rng);

  // Equal effect weights, the interaction down-weighted by 1/8.
  const double base_mu = scale_mu / (3.0 + 1.0 / 8.0);
  const double base_sigma = tau_squared(scale_sigma) / 2.0;

  ScenarioTruth truth;
  truth.family_id = "gaussian";
  truth.level = level;
  truth.seed = seed;
  truth.effects.push_back(
      intercept_effect(0, "f0_mu", tb, base_mu, grid, n, rng));
  truth.effects.push_back(
      scalar_effect(0, "f1_mu", "z1", z1, zb, tb, base_mu, grid, rng));
  truth.effects.push_back(
      scalar_effect(0, "f2_mu", "z2", z2, zb, tb, base_mu, grid, rng));
  truth.effects.push_back(interaction_effect(
      0, "f3_mu", "z1", "z2", z1, z2, zb, tb, base_mu / 8.0, grid,
      truth.effects[1], truth.effects[2], rng));
  truth.effects.push_back(
      intercept_effect(1, "f0_sigma", tb, base_sigma, grid, n, rng));
  truth.effects.push_back(
      scalar_effect(1, "f1_sigma", "z1", z1, zb, tb, base_sigma, grid, rng));

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, g);
  Eigen::MatrixXd log_sigma = Eigen::MatrixXd::Zero(n, g);
  for (const auto& e : truth.effects) {
    (e.q == 0 ? mu : log_sigma) += e.on_data;
  }
  Eigen::MatrixXd sigma = log_sigma.array().exp();
  truth.predictors = {mu, log_sigma};
  truth.parameters = {mu, sigma};

  ScenarioResult result;
  result.data.response = draw_gaussian_curves(mu, sigma, level, grid, rng);
  result.data.response_grid = grid;
  result.data.covariates.emplace("z1", ScalarCovariate{z1});
  result.data.covariates.emplace("z2", ScalarCovariate{z2});
  result.truth = std::move(truth);
  return result;
}

ScenarioResult categorical_scenario(int n, int g, DependencyLevel level,
                                    double scale_mu, double scale_sigma,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Grid grid = Grid::uniform(0.0, 10.0, g);
  SplineBasisDef tb(3, 8, 0.0, 10.0);

  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<int> g1(static_cast<size_t>(n)), g2(static_cast<size_t>(n));
  for (auto& c : g1) c = pick(rng);
  for (auto& c : g2) c = pick(rng);
  const std::vector<std::string> levels{"1", "2", "3", "4"};

  const double base_mu = scale_mu / 3.0;
  const double base_sigma = tau_squared(scale_sigma) / 2.0;

  ScenarioTruth truth;
  truth.family_id = "gaussian";
  truth.level = level;
  truth.seed = seed;
  truth.effects.push_back(
      intercept_effect(0, "beta0_mu", tb, base_mu, grid, n, rng));
  truth.effects.push_back(
      group_effect(0, "beta_g1_mu", "g1", g1, 4, tb, base_mu, grid, rng));
  truth.effects.push_back(
      group_effect(0, "beta_g2_mu", "g2", g2, 4, tb, base_mu, grid, rng));
  truth.effects.push_back(
      intercept_effect(1, "beta0_sigma", tb, base_sigma, grid, n, rng));
  truth.effects.push_back(
      group_effect(1, "beta_g1_sigma", "g1", g1, 4, tb, base_sigma, grid, rng));

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, g);
  Eigen::MatrixXd log_sigma = Eigen::MatrixXd::Zero(n, g);
  for (const auto& e : truth.effects) {
    (e.q == 0 ? mu : log_sigma) += e.on_data;
  }
  Eigen::MatrixXd sigma = log_sigma.array().exp();
  truth.predictors = {mu, log_sigma};
  truth.parameters = {mu, sigma};

  ScenarioResult result;
  result.data.response = draw_gaussian_curves(mu, sigma, level, grid, rng);
  result.data.response_grid = grid;
  result.data.covariates.emplace("g1", CategoricalCovariate{levels, g1});
  result.data.covariates.emplace("g2", CategoricalCovariate{levels, g2});
  result.truth = std::move(truth);
  return result;
}

ScenarioResult application_scenario(int n, int g, DependencyLevel level,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Grid grid = Grid::uniform(0.0, 10.0, g);

  std::uniform_int_distribution<int> pick4(0, 3);
  std::uniform_int_distribution<int> pick2(0, 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> mitc(static_cast<size_t>(n)), batch(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    mitc[static_cast<size_t>(i)] = pick4(rng);
    batch[static_cast<size_t>(i)] =
        mitc[static_cast<size_t>(i)] * 2 + pick2(rng);  // nested in mitc
  }
  const std::vector<std::string> mitc_levels{"1", "2", "3", "4"};
  const std::vector<std::string> batch_levels{"b1", "b2", "b3", "b4",
                                              "b5", "b6", "b7", "b8"};

  // Competitor-strain curves: smooth growth-like trajectories.
  Eigen::MatrixXd c_curves(n, g);
  RandomSplineDef wiggle;
  wiggle.n_basis = 8;
  wiggle.scale = 0.01;
  wiggle.a = 0.0;
  wiggle.b = 10.0;
  Eigen::MatrixXd noise = draw_random_spline(wiggle, grid, n, rng);
  for (int i = 0; i < n; ++i) {
    std::map<std::string, double> p{
        {"y0", 0.05},
        {"y_inf", 0.6 + 0.2 * mitc[static_cast<size_t>(i)] +
                      0.2 * (unif(rng) - 0.5)},
        {"r", 0.8 + 0.8 * unif(rng)}};
    c_curves.row(i) =
        (parametric_growth_curve(GrowthModel::Logistic, p, grid) +
         noise.row(i).transpose())
            .cwiseMax(0.01)
            .transpose();
  }
  FunctionalCovariate c_cov;
  c_cov.values = c_curves;
  c_cov.grid = grid;
  FunctionalCovariate dc_cov = numeric_derivative(c_cov);

  // Pseudo-responses carrying group, growth-shape and extinction structure;
  // the fitted model below defines the scenario's true parameter surfaces.
  Eigen::MatrixXd pseudo(n, g);
  std::gamma_distribution<double> gamma_noise(25.0, 1.0 / 25.0);
  std::uniform_real_distribution<double> t_ext(2.0, 8.0);
  for (int i = 0; i < n; ++i) {
    const int m = mitc[static_cast<size_t>(i)];
    std::map<std::string, double> p{
        {"y0", 0.05},
        {"y_inf", 0.5 + 0.15 * m + 0.1 * (batch[static_cast<size_t>(i)] % 2)},
        {"r", 0.6 + 0.6 * unif(rng)}};
    Eigen::VectorXd base =
        parametric_growth_curve(GrowthModel::Logistic, p, grid);
    const bool extinct = unif(rng) < 0.05 + 0.1 * m;
    const double cutoff = extinct ? t_ext(rng) : 1e30;
    for (int t = 0; t < g; ++t) {
      pseudo(i, t) = grid[t] >= cutoff ? 0.0 : base[t] * gamma_noise(rng);
    }
  }

  FunctionalDataset pseudo_data;
  pseudo_data.response = pseudo;
  pseudo_data.response_grid = grid;
  pseudo_data.covariates.emplace("mitc",
                                 CategoricalCovariate{mitc_levels, mitc});
  pseudo_data.covariates.emplace("batch",
                                 CategoricalCovariate{batch_levels, batch});
  pseudo_data.covariates.emplace("C", c_cov);
  pseudo_data.covariates.emplace("dC", dc_cov);

  Hyper hyper;
  hyper.step_lengths = {0.2};
  hyper.m_stop_max = 40;
  hyper.seed = seed;
  FittedModel model =
      fit(pseudo_data, scenario_model_spec(ScenarioModel::Application), hyper);
  ParamSurfaces fitted = predict(model, pseudo_data);

  // Clamp the fitted truth into a well-behaved region and realign the
  // link-scale predictors.
  Eigen::MatrixXd mu = fitted.parameters[0].cwiseMax(1e-3).cwiseMin(1e3);
  Eigen::MatrixXd cv = fitted.parameters[1].cwiseMax(0.05).cwiseMin(2.0);
  Eigen::MatrixXd pz = fitted.parameters[2].cwiseMax(1e-3).cwiseMin(0.95);

  ScenarioTruth truth;
  truth.family_id = "za-gamma";
  truth.level = level;
  truth.seed = seed;
  truth.parameters = {mu, cv, pz};
  truth.predictors = {mu.array().log().matrix(), cv.array().log().matrix(),
                      (pz.array() / (1.0 - pz.array())).log().matrix()};

  FunctionalDataset standardized = standardize_for_model(model, pseudo_data);
  auto coeff = coefficients_at(model, model.m_stop);
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    for (size_t j = 0; j < model.blocks[q].size(); ++j) {
      const auto& block = model.blocks[q][j];
      TruthEffect e;
      e.q = static_cast<int>(q);
      e.label = block.structure.term.display_label();
      e.kind = block.structure.term.kind;
      e.covariates = block.structure.term.covariates;
      Eigen::VectorXd flat =
          evaluate_design(block.structure, standardized) * coeff[q][j];
      e.on_data.resize(n, g);
      for (int i = 0; i < n; ++i) {
        e.on_data.row(i) = flat.segment(static_cast<long>(i) * g, g).transpose();
      }
      truth.effects.push_back(std::move(e));
    }
  }

  ScenarioResult result;
  result.data = pseudo_data;
  result.data.response = draw_general_curves(
      *zero_adjusted_gamma_family(), truth.parameters, level, grid, rng);
  result.truth = std::move(truth);
  return result;
}

}  // namespace

ScenarioModel scenario_from_name(const std::string& name) {
  if (name == "continuous") return ScenarioModel::Continuous;
  if (name == "categorical") return ScenarioModel::Categorical;
  if (name == "application") return ScenarioModel::Application;
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string scenario_name(ScenarioModel model) {
  switch (model) {
    case ScenarioModel::Continuous: return "continuous";
    case ScenarioModel::Categorical: return "categorical";
    case ScenarioModel::Application: return "application";
  }
  return "continuous";
}

double tau_squared(double scale_sigma) {
  if (scale_sigma < 0.0) throw RangeError("sigma effect scale must be >= 0");
  return -std::log(2.0) + std::log(std::sqrt(4.0 * scale_sigma + 1.0) + 1.0);
}

ScenarioResult generate_scenario(ScenarioModel model, int n_curves,
                                 int grid_size, DependencyLevel level,
                                 double scale_mu, double scale_sigma,
                                 std::uint64_t seed) {
  if (n_curves < 2 || grid_size < 2) {
    throw ConfigError("scenario needs N >= 2 curves and G >= 2 grid points");
  }
  switch (model) {
    case ScenarioModel::Continuous:
      return continuous_scenario(n_curves, grid_size, level, scale_mu,
                                 scale_sigma, seed);
    case ScenarioModel::Categorical:
      return categorical_scenario(n_curves, grid_size, level, scale_mu,
                                  scale_sigma, seed);
    case ScenarioModel::Application:
      return application_scenario(n_curves, grid_size, level, seed);
  }
  throw ConfigError("unknown scenario");
}

ModelSpec scenario_model_spec(ScenarioModel model) {
  auto intercept = [] {
    TermDescriptor t;
    t.kind = TermKind::FunctionalIntercept;
    t.n_basis_y = 20;
    return t;
  };
  auto smooth = [](const std::string& z) {
    TermDescriptor t;
    t.kind = TermKind::SmoothScalar;
    t.covariates = {z};
    return t;
  };
  auto group = [](const std::string& z, const std::string& parent = "") {
    TermDescriptor t;
    t.kind = TermKind::GroupIntercept;
    t.covariates = {z};
    t.center_on = parent;
    return t;
  };

  ModelSpec spec;
  switch (model) {
    case ScenarioModel::Continuous: {
      spec.family_id = "gaussian";
      TermDescriptor inter;
      inter.kind = TermKind::SmoothInteraction;
      inter.covariates = {"z1", "z2"};
      spec.per_parameter_terms = {
          {intercept(), smooth("z1"), smooth("z2"), inter},
          {intercept(), smooth("z1")}};
      break;
    }
    case ScenarioModel::Categorical: {
      spec.family_id = "gaussian";
      spec.per_parameter_terms = {{intercept(), group("g1"), group("g2")},
                                  {intercept(), group("g1")}};
      break;
    }
    case ScenarioModel::Application: {
      spec.family_id = "za-gamma";
      auto historical = [](const std::string& name) {
        TermDescriptor t;
        t.kind = TermKind::Historical;
        t.covariates = {name};
        return t;
      };
      for (int q = 0; q < 3; ++q) {
        spec.per_parameter_terms.push_back(
            {intercept(), group("mitc"), group("batch", "mitc"),
             historical("C"), historical("dC")});
      }
      break;
    }
  }
  return spec;
}

Eigen::MatrixXd truth_on_lattice(const TruthEffect& effect,
                                 const std::vector<Eigen::VectorXd>& rows,
                                 const Grid& t_grid) {
  if (!effect.eval) {
    throw EvalError("true effect '" + effect.label +
                    "' has no closed-form evaluator");
  }
  Eigen::MatrixXd out(static_cast<long>(rows.size()), t_grid.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < t_grid.size(); ++c) {
      out(static_cast<long>(r), c) = effect.eval(rows[r], t_grid[c]);
    }
  }
  return out;
}

}  // namespace fb
