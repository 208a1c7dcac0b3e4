#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "basis/bspline.hpp"
#include "sim/growth.hpp"
#include "sim/metrics.hpp"
#include "sim/random_spline.hpp"
#include "sim/scenarios.hpp"

using namespace fb;

TEST_CASE("omega transforms the difference penalty to a 0/1 diagonal") {
  for (int K : {5, 8, 20}) {
    for (int d : {1, 2}) {
      Eigen::MatrixXd omega = build_omega(K, d);
      Eigen::MatrixXd p = difference_penalty(K, d);
      Eigen::MatrixXd transformed = omega.transpose() * p * omega;
      for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) {
          const double expect = (i == j && i >= d) ? 1.0 : 0.0;
          CHECK(std::abs(transformed(i, j) - expect) < 1e-10);
        }
      }
      // Leading block: orthonormal polynomial columns.
      Eigen::MatrixXd l = omega.leftCols(d);
      CHECK((l.transpose() * l - Eigen::MatrixXd::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    }
  }
  // d = 1: constant leading column.
  Eigen::MatrixXd omega = build_omega(6, 1);
  Eigen::VectorXd c0 = omega.col(0);
  CHECK((c0.array() - c0(0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("weight matrix satisfies both trace identities") {
  Grid grid = Grid::uniform(0.0, 1.0, 60);
  SplineBasisDef def(3, 8, 0.0, 1.0);
  const int d = 2;
  Eigen::MatrixXd btilde = eval_bspline_basis(def, grid.as_vector());
  Eigen::MatrixXd bo = btilde * build_omega(8, d);
  for (double scale : {0.5, 1.0, 2.0}) {
    for (double smooth : {0.2, 0.8}) {
      Eigen::VectorXd w = build_weight_matrix(scale, smooth, bo, d);
      Eigen::MatrixXd b = bo * w.asDiagonal();
      Eigen::MatrixXd btb = b.transpose() * b;
      const double total = btb.trace() / grid.size();
      const double penalized = btb.diagonal().tail(8 - d).sum() / grid.size();
      CHECK(total == doctest::Approx(scale).epsilon(1e-8));
      CHECK(1.0 - penalized / total == doctest::Approx(smooth).epsilon(1e-8));
    }
  }
  // smoothness = 1: penalized weights vanish.
  Eigen::VectorXd w1 = build_weight_matrix(1.0, 1.0, bo, d);
  CHECK(w1.tail(8 - d).cwiseAbs().maxCoeff() == 0.0);
  // scale = 0: all weights vanish.
  CHECK(build_weight_matrix(0.0, 0.5, bo, d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random spline draws hit the requested variance") {
  RandomSplineDef def;
  def.scale = 1.7;
  def.smoothness = 0.8;
  def.a = 0.0;
  def.b = 10.0;
  Grid grid = Grid::uniform(0.0, 10.0, 40);
  std::mt19937_64 rng(5);
  Eigen::MatrixXd draws = draw_random_spline(def, grid, 10000, rng);
  double mean_var = 0.0;
  for (int t = 0; t < grid.size(); ++t) {
    const double m = draws.col(t).mean();
    mean_var += (draws.col(t).array() - m).square().sum() / (draws.rows() - 1);
  }
  mean_var /= grid.size();
  CHECK(mean_var == doctest::Approx(1.7).epsilon(0.03));

  def.scale = 0.0;
  std::mt19937_64 rng2(5);
  CHECK(draw_random_spline(def, grid, 10, rng2).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 ra(9), rb(9);
  Eigen::MatrixXd a = draw_random_spline(def, grid, 3, ra);
  Eigen::MatrixXd b = draw_random_spline(def, grid, 3, rb);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian curve draws collapse to the mean at zero sd") {
  Grid grid = Grid::uniform(0.0, 1.0, 12);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Random(6, 12);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(6, 12);
  std::mt19937_64 rng(7);
  Eigen::MatrixXd y =
      draw_gaussian_curves(mu, sigma, DependencyLevel::Dependent, grid, rng);
  CHECK((y - mu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dependent error draws are smoother than independent ones") {
  Grid grid = Grid::uniform(0.0, 10.0, 100);
  std::mt19937_64 rng(11);
  Eigen::MatrixXd indep =
      draw_error_process(DependencyLevel::Independent, grid, 200, rng);
  Eigen::MatrixXd dep =
      draw_error_process(DependencyLevel::Dependent, grid, 200, rng);
  auto roughness = [](const Eigen::MatrixXd& m) {
    return (m.rightCols(m.cols() - 1) - m.leftCols(m.cols() - 1))
               .cwiseAbs()
               .mean();
  };
  CHECK(roughness(dep) < roughness(indep) / 2.0);
  // Standardized: pointwise variance near one for both.
  for (const auto* m : {&indep, &dep}) {
    double mean_var = 0.0;
    for (long t = 0; t < m->cols(); ++t) {
      const double mu = m->col(t).mean();
      mean_var += (m->col(t).array() - mu).square().sum() / (m->rows() - 1);
    }
    CHECK(mean_var / m->cols() == doctest::Approx(1.0).epsilon(0.25));
  }
}

TEST_CASE("inverse transform sampling respects the zero atom") {
  Grid grid = Grid::uniform(0.0, 1.0, 3);
  auto fam = zero_adjusted_gamma_family();
  const int n = 10000;
  std::vector<Eigen::MatrixXd> theta = {
      Eigen::MatrixXd::Constant(n, 3, 2.0),
      Eigen::MatrixXd::Constant(n, 3, 0.5),
      Eigen::MatrixXd::Constant(n, 3, 0.3)};
  std::mt19937_64 rng(13);
  Eigen::MatrixXd y =
      draw_general_curves(*fam, theta, DependencyLevel::Independent, grid, rng);
  const double zero_frac =
      (y.col(1).array() == 0.0).cast<double>().sum() / n;
  CHECK(zero_frac == doctest::Approx(0.3).epsilon(0.034));

  theta[2].setConstant(1.0);  // p = 1: atom only
  std::mt19937_64 rng2(13);
  Eigen::MatrixXd y1 =
      draw_general_curves(*fam, theta, DependencyLevel::Independent, grid, rng2);
  CHECK(y1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parametric growth curves hit their anchor values") {
  Grid grid = Grid::uniform(0.0, 10.0, 21);  // starts at t = 0
  std::map<std::string, double> logi = {
      {"y0", 0.1}, {"y_inf", 1.0}, {"r", 1.0}};
  CHECK(parametric_growth_curve(GrowthModel::Logistic, logi, grid)(0) ==
        doctest::Approx(0.1));

  std::map<std::string, double> flat = {
      {"y0", 0.4}, {"y_inf", 0.4}, {"r", 1.0}};
  Eigen::VectorXd c = parametric_growth_curve(GrowthModel::Logistic, flat, grid);
  CHECK((c.array() - 0.4).abs().maxCoeff() < 1e-12);

  std::map<std::string, double> gomp = {
      {"y0", 0.1}, {"y_inf", 2.0}, {"mu_max", 5.0}, {"lag", 1.0}};
  Eigen::VectorXd gc = parametric_growth_curve(GrowthModel::Gompertz, gomp, grid);
  CHECK(gc(20) == doctest::Approx(2.0).epsilon(1e-6));  // t = 10 * lag

  std::map<std::string, double> baranyi = {
      {"y0", 0.1}, {"y_inf", 2.0}, {"mu_max", 5.0}, {"lag", 1.0}};
  Eigen::VectorXd bc =
      parametric_growth_curve(GrowthModel::BaranyiRoberts, baranyi, grid);
  CHECK(bc(0) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(bc(20) == doctest::Approx(2.0).epsilon(1e-3));

  std::map<std::string, double> bad = {
      {"y0", 2.0}, {"y_inf", 1.0}, {"mu_max", 1.0}, {"lag", 1.0}};
  CHECK_THROWS_AS(parametric_growth_curve(GrowthModel::Gompertz, bad, grid),
                  DomainError);
}

TEST_CASE("metric definitions") {
  auto fam = gaussian_family();
  std::vector<Eigen::MatrixXd> truth = {Eigen::MatrixXd::Zero(4, 5),
                                        Eigen::MatrixXd::Ones(4, 5)};
  CHECK(mean_kld(*fam, truth, truth) == doctest::Approx(0.0));
  std::vector<Eigen::MatrixXd> shifted = {Eigen::MatrixXd::Ones(4, 5),
                                          Eigen::MatrixXd::Ones(4, 5)};
  CHECK(mean_kld(*fam, truth, shifted) == doctest::Approx(0.5));

  // Loop oracle on random surfaces.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  std::vector<Eigen::MatrixXd> a = {Eigen::MatrixXd(3, 4),
                                    Eigen::MatrixXd(3, 4)};
  std::vector<Eigen::MatrixXd> b = a;
  for (auto* s : {&a, &b}) {
    for (auto& m : *s) {
      for (long i = 0; i < m.size(); ++i) m(i / 4, i % 4) = nd(rng);
    }
    (*s)[1] = ((*s)[1].array().abs() + 0.2).matrix();
  }
  double loop = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int t = 0; t < 4; ++t) {
      Eigen::Vector2d ta(a[0](i, t), a[1](i, t));
      Eigen::Vector2d tb(b[0](i, t), b[1](i, t));
      loop += fam->kld(ta, tb);
    }
  }
  CHECK(mean_kld(*fam, a, b) == doctest::Approx(loop / 12).epsilon(1e-12));

  Eigen::MatrixXd t1 = Eigen::MatrixXd::Random(5, 6);
  CHECK(effect_rmse(t1, t1) == doctest::Approx(0.0));
  const double range = t1.maxCoeff() - t1.minCoeff();
  Eigen::MatrixXd est = t1.array() + 0.01;
  CHECK(effect_relrmse(t1, est) == doctest::Approx(0.01 / range));
  CHECK_THROWS_AS(effect_relrmse(Eigen::MatrixXd::Zero(3, 3),
                                 Eigen::MatrixXd::Zero(3, 3)),
                  RangeZeroError);
}

TEST_CASE("tau squared matches the log-normal variance identity") {
  for (double s : {0.25, 1.0, 4.0}) {
    const double t2 = tau_squared(s);
    // Var(exp(Z)) = (exp(t2) - 1) exp(t2) for Z ~ N(0, t2).
    CHECK((std::exp(t2) - 1.0) * std::exp(t2) == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("continuous scenario assembles predictors from its true effects") {
  ScenarioResult r = generate_scenario(ScenarioModel::Continuous, 30, 25,
                                       DependencyLevel::Independent, 1.0, 1.0,
                                       99);
  CHECK(r.data.n_curves() == 30);
  CHECK(r.data.grid_size() == 25);
  REQUIRE(r.truth.predictors.size() == 2);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(30, 25);
  Eigen::MatrixXd ls = Eigen::MatrixXd::Zero(30, 25);
  for (const auto& e : r.truth.effects) {
    (e.q == 0 ? mu : ls) += e.on_data;
  }
  CHECK((mu - r.truth.predictors[0]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ls - r.truth.predictors[1]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.truth.parameters[1].array() -
         r.truth.predictors[1].array().exp())
            .abs()
            .maxCoeff() < 1e-12);
  // Centered scalar effects average out over the drawn covariates.
  for (const auto& e : r.truth.effects) {
    if (e.kind == TermKind::SmoothScalar) {
      CHECK(e.on_data.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("zero sigma scale gives constant-variance data") {
  ScenarioResult r = generate_scenario(ScenarioModel::Categorical, 20, 15,
                                       DependencyLevel::Independent, 1.0, 0.0,
                                       7);
  const Eigen::MatrixXd& sigma = r.truth.parameters[1];
  CHECK((sigma.array() - sigma(0, 0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("scenario generation is deterministic") {
  ScenarioResult a = generate_scenario(ScenarioModel::Categorical, 12, 10,
                                       DependencyLevel::HighDependency, 1.0,
                                       1.0, 31);
  ScenarioResult b = generate_scenario(ScenarioModel::Categorical, 12, 10,
                                       DependencyLevel::HighDependency, 1.0,
                                       1.0, 31);
  CHECK((a.data.response - b.data.response).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interaction effects are orthogonal to their marginals on data") {
  ScenarioResult r = generate_scenario(ScenarioModel::Continuous, 40, 20,
                                       DependencyLevel::Independent, 1.0, 1.0,
                                       55);
  const TruthEffect* inter = nullptr;
  const TruthEffect *f1 = nullptr, *f2 = nullptr;
  for (const auto& e : r.truth.effects) {
    if (e.kind == TermKind::SmoothInteraction) inter = &e;
    if (e.label == "f1_mu") f1 = &e;
    if (e.label == "f2_mu") f2 = &e;
  }
  REQUIRE(inter != nullptr);
  REQUIRE(f1 != nullptr);
  REQUIRE(f2 != nullptr);
  // Per time column: interaction values uncorrelated with 1, f1, f2.
  for (int t = 0; t < 20; ++t) {
    const auto col = inter->on_data.col(t);
    CHECK(std::abs(col.sum()) < 1e-8);
    CHECK(std::abs(col.dot(f1->on_data.col(t))) < 1e-8);
    CHECK(std::abs(col.dot(f2->on_data.col(t))) < 1e-8);
  }
}

TEST_CASE("scenario model specs match the generated structure") {
  ModelSpec cont = scenario_model_spec(ScenarioModel::Continuous);
  CHECK(cont.family_id == "gaussian");
  CHECK(cont.n_parameters() == 2);
  ModelSpec app = scenario_model_spec(ScenarioModel::Application);
  CHECK(app.family_id == "za-gamma");
  CHECK(app.n_parameters() == 3);
}
