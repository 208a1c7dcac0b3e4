#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "family/family.hpp"

using namespace fb;

namespace {

// Central finite difference of the loss in predictor q.
double fd_gradient(const Family& fam, int q, double y, Eigen::VectorXd h,
                   double step = 1e-5) {
  const double h0 = h(q);
  h(q) = h0 + step;
  const double up = fam.loss(y, h);
  h(q) = h0 - step;
  const double down = fam.loss(y, h);
  return (up - down) / (2 * step);
}

void check_gradients(const Family& fam, double y, const Eigen::VectorXd& h,
                     double rel_tol = 1e-6) {
  for (int q = 0; q < fam.n_parameters(); ++q) {
    const double analytic = fam.partial_gradient(q, y, h);
    const double numeric = fd_gradient(fam, q, y, h);
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    CHECK(std::abs(analytic - numeric) / scale < rel_tol);
  }
}

}  // namespace

TEST_CASE("gaussian gradients at the stationary and unit-residual points") {
  auto fam = gaussian_family();
  Eigen::VectorXd h(2);
  h << 2.0, 0.0;  // mu = 2, sigma = 1
  CHECK(fam->partial_gradient(0, 2.0, h) == doctest::Approx(0.0));
  CHECK(-fam->partial_gradient(1, 2.0, h) == doctest::Approx(-1.0));
  h << 0.0, 0.0;
  CHECK(-fam->partial_gradient(0, 1.0, h) == doctest::Approx(1.0));
}

TEST_CASE("gaussian gradients match finite differences") {
  auto fam = gaussian_family();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd h(2);
    h << 2.0 * nd(rng), nd(rng);
    check_gradients(*fam, 2.0 * nd(rng), h);
  }
}

TEST_CASE("gamma-cv gradient vanishes at the mean") {
  auto fam = gamma_cv_family();
  Eigen::VectorXd h(2);
  h << std::log(3.0), std::log(0.4);
  CHECK(fam->partial_gradient(0, 3.0, h) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gamma-cv loss rejects nonpositive responses") {
  auto fam = gamma_cv_family();
  Eigen::VectorXd h(2);
  h << 0.0, 0.0;
  CHECK_THROWS_AS(fam->loss(-1.0, h), SupportError);
}

TEST_CASE("gamma-cv gradients match finite differences") {
  auto fam = gamma_cv_family();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::uniform_real_distribution<double> uy(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd h(2);
    h << ud(rng), ud(rng);
    check_gradients(*fam, uy(rng), h);
  }
}

TEST_CASE("gamma-cv implied moments via quantile sampling") {
  auto fam = gamma_cv_family();
  Eigen::VectorXd theta(2);
  theta << 2.0, 0.5;  // mean 2, cv 0.5 -> sd 1
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = fam->quantile(ud(rng), theta);
    sum += y;
    sumsq += y * y;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
  CHECK(sd == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gamma-cv quantile is monotone in u") {
  auto fam = gamma_cv_family();
  Eigen::VectorXd theta(2);
  theta << 1.5, 0.8;
  double prev = 0.0;
  for (double u = 0.05; u < 1.0; u += 0.05) {
    const double q = fam->quantile(u, theta);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("zero-adjusted gamma gradients at zero and positive responses") {
  auto fam = zero_adjusted_gamma_family();
  CHECK(fam->n_parameters() == 3);
  Eigen::VectorXd h(3);
  h << std::log(2.0), std::log(0.5), 0.0;  // p = 0.5
  // Negative gradients u = -d rho / d h.
  CHECK(-fam->partial_gradient(2, 0.0, h) == doctest::Approx(0.5));
  CHECK(-fam->partial_gradient(2, 1.0, h) == doctest::Approx(-0.5));
  CHECK(fam->partial_gradient(0, 0.0, h) == doctest::Approx(0.0));
  CHECK(fam->partial_gradient(1, 0.0, h) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fam->loss(-0.5, h), SupportError);
}

TEST_CASE("zero-adjusted gamma gradients match finite differences") {
  auto fam = zero_adjusted_gamma_family();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::uniform_real_distribution<double> uy(0.2, 5.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd h(3);
    h << ud(rng), ud(rng), 2.0 * ud(rng);
    check_gradients(*fam, uy(rng), h);
    check_gradients(*fam, 0.0, h);
  }
}

TEST_CASE("zero-adjusted gamma quantile returns zero below the atom") {
  auto fam = zero_adjusted_gamma_family();
  Eigen::VectorXd theta(3);
  theta << 2.0, 0.5, 0.3;
  CHECK(fam->quantile(0.1, theta) == 0.0);
  CHECK(fam->quantile(0.3, theta) == 0.0);
  CHECK(fam->quantile(0.31, theta) > 0.0);
}

TEST_CASE("empirical loss equals an explicit pointwise sum") {
  auto fam = gaussian_family();
  const int g = 17;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::VectorXd y(g);
  Eigen::MatrixXd h(2, g);
  for (int t = 0; t < g; ++t) {
    y(t) = nd(rng);
    h(0, t) = nd(rng);
    h(1, t) = nd(rng);
  }
  double loop = 0.0;
  for (int t = 0; t < g; ++t) loop += fam->loss(y(t), h.col(t));
  CHECK(empirical_loss(*fam, y, h) == doctest::Approx(loop).epsilon(1e-12));

  // Zero residual at unit sigma: G * 0.5 * log(2*pi).
  Eigen::VectorXd y2 = Eigen::VectorXd::Constant(g, 1.5);
  Eigen::MatrixXd h2(2, g);
  h2.row(0).setConstant(1.5);
  h2.row(1).setZero();
  CHECK(empirical_loss(*fam, y2, h2) ==
        doctest::Approx(g * 0.5 * std::log(2 * M_PI)));

  // G = 1 reduces to rho.
  Eigen::VectorXd y1(1);
  y1 << 0.7;
  Eigen::MatrixXd h1(2, 1);
  h1 << 0.2, 0.1;
  CHECK(empirical_loss(*fam, y1, h1) ==
        doctest::Approx(fam->loss(0.7, h1.col(0))));
}

TEST_CASE("kld closed forms") {
  auto gauss = gaussian_family();
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 2.0;
  CHECK(gauss->kld(a, a) == doctest::Approx(0.0));
  a << 0.0, 1.0;
  b << 1.0, 1.0;
  CHECK(gauss->kld(a, b) == doctest::Approx(0.5));
}

TEST_CASE("gamma kld matches numerical integration") {
  auto fam = gamma_cv_family();
  Eigen::VectorXd t_true(2), t_est(2);
  t_true << 2.0, 0.5;
  t_est << 2.5, 0.7;
  // Negative log density at y for (mu, cv): recovered from the loss.
  auto logf = [&](double y, const Eigen::VectorXd& th) {
    Eigen::VectorXd h = th.array().log().matrix();
    return -fam->loss(y, h);
  };
  // Simpson's rule on (0, 30] with a fine grid.
  const int n = 60000;
  const double a = 1e-9, b = 30.0, h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double ft = std::exp(logf(y, t_true));
    acc += w * ft * (logf(y, t_true) - logf(y, t_est));
  }
  acc *= h / 3.0;
  CHECK(fam->kld(t_true, t_est) == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("kld is nonnegative and zero on the diagonal for all families") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ud(0.3, 3.0);
  std::uniform_real_distribution<double> up(0.1, 0.9);
  for (const auto& fam :
       {gaussian_family(), gamma_cv_family(), zero_adjusted_gamma_family()}) {
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd a(fam->n_parameters()), b(fam->n_parameters());
      for (int q = 0; q < fam->n_parameters(); ++q) {
        a(q) = ud(rng);
        b(q) = ud(rng);
      }
      if (fam->n_parameters() == 3) {
        a(2) = up(rng);
        b(2) = up(rng);
      }
      CHECK(fam->kld(a, a) == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(fam->kld(a, b) >= -1e-10);
    }
  }
}

TEST_CASE("losses are negative log densities that integrate to one") {
  // Gaussian and gamma continuous parts; zero-adjusted mixes in the atom.
  auto gauss = gaussian_family();
  Eigen::VectorXd hg(2);
  hg << 0.5, std::log(0.8);
  double acc = 0.0;
  const int n = 40000;
  for (int i = 0; i <= n; ++i) {
    const double y = -10.0 + 20.0 * i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * std::exp(-gauss->loss(y, hg)) * (20.0 / n);
  }
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));

  auto za = zero_adjusted_gamma_family();
  Eigen::VectorXd hz(3);
  hz << std::log(2.0), std::log(0.5), std::log(0.3 / 0.7);  // p = 0.3
  double cont = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double y = 40.0 * i / n;
    const double w = (i == n) ? 0.5 : 1.0;
    cont += w * std::exp(-za->loss(y, hz)) * (40.0 / n);
  }
  CHECK(cont + 0.3 == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("families resolve by id") {
  CHECK(family_by_id("gaussian")->id() == "gaussian");
  CHECK(family_by_id("gamma-cv")->id() == "gamma-cv");
  CHECK(family_by_id("za-gamma")->id() == "za-gamma");
  CHECK_THROWS_AS(family_by_id("weibull"), ConfigError);
}
