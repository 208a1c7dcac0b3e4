#include "sim/random_spline.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "basis/bspline.hpp"

namespace fb {

Eigen::MatrixXd build_omega(int K, int d) {
  if (d < 1 || d >= K) throw DimensionError("build_omega needs 1 <= d < K");
  // Orthonormal basis of the penalty null space: polynomials of the
  // coefficient index of orders 0..d-1.
  Eigen::MatrixXd poly(K, d);
  for (int i = 0; i < K; ++i) {
    double v = 1.0;
    for (int p = 0; p < d; ++p) {
      poly(i, p) = v;
      v *= static_cast<double>(i + 1);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(poly);
  Eigen::MatrixXd L =
      Eigen::MatrixXd(qr.householderQ()).leftCols(d);

  Eigen::MatrixXd D = difference_operator(K, d);
  Eigen::MatrixXd right =
      D.transpose() * (D * D.transpose()).ldlt().solve(
                          Eigen::MatrixXd::Identity(K - d, K - d));
  Eigen::MatrixXd omega(K, K);
  omega.leftCols(d) = L;
  omega.rightCols(K - d) = right;
  return omega;
}

Eigen::VectorXd build_weight_matrix(double scale, double smoothness,
                                    const Eigen::MatrixXd& btilde_omega,
                                    int d) {
  const int K = static_cast<int>(btilde_omega.cols());
  if (d < 0 || d > K) throw DimensionError("invalid null-space dimension");
  if (!(smoothness >= 0.0 && smoothness <= 1.0)) {
    throw RangeError("smoothness share must lie in [0, 1]");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(K);
  if (scale == 0.0) return w;
  if (scale < 0.0) throw RangeError("variance scale must be >= 0");

  const double g = static_cast<double>(btilde_omega.rows());
  const double var_un =
      btilde_omega.leftCols(d).squaredNorm() / g;  // (1/G) tr of the block
  const double var_pe = btilde_omega.rightCols(K - d).squaredNorm() / g;

  if (smoothness > 0.0 && (d == 0 || var_un <= 0.0)) {
    throw DegenerateSmoothnessError("empty unpenalized subspace");
  }
  if (smoothness < 1.0 && (K - d == 0 || var_pe <= 0.0)) {
    throw DegenerateSmoothnessError("empty penalized subspace");
  }
  if (smoothness > 0.0) {
    w.head(d).setConstant(std::sqrt(scale * smoothness / var_un));
  }
  if (smoothness < 1.0) {
    w.tail(K - d).setConstant(
        std::sqrt(scale * (1.0 - smoothness) / var_pe));
  }
  return w;
}

Eigen::MatrixXd random_spline_basis(const RandomSplineDef& def,
                                    const Grid& grid) {
  SplineBasisDef basis(def.degree, def.n_basis, def.a, def.b);
  Eigen::MatrixXd btilde = eval_bspline_basis(basis, grid.as_vector());
  if (!def.penalized) {
    if (def.scale == 0.0) return Eigen::MatrixXd::Zero(grid.size(), def.n_basis);
    const double var =
        btilde.squaredNorm() / static_cast<double>(grid.size());
    return btilde * std::sqrt(def.scale / var);
  }
  Eigen::MatrixXd omega = build_omega(def.n_basis, def.diff_order);
  Eigen::MatrixXd bo = btilde * omega;
  Eigen::VectorXd w =
      build_weight_matrix(def.scale, def.smoothness, bo, def.diff_order);
  return bo * w.asDiagonal();
}

Eigen::MatrixXd draw_random_spline(const RandomSplineDef& def,
                                   const Grid& grid, int n,
                                   std::mt19937_64& rng) {
  Eigen::MatrixXd basis = random_spline_basis(def, grid);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd theta(def.n_basis, n);
  for (long j = 0; j < theta.cols(); ++j) {
    for (long i = 0; i < theta.rows(); ++i) theta(i, j) = normal(rng);
  }
  return (basis * theta).transpose();
}

DependencyLevel dependency_from_name(const std::string& name) {
  if (name == "independent") return DependencyLevel::Independent;
  if (name == "dependent") return DependencyLevel::Dependent;
  if (name == "high_dependency") return DependencyLevel::HighDependency;
  throw ConfigError("unknown dependency level '" + name + "'");
}

std::string dependency_name(DependencyLevel level) {
  switch (level) {
    case DependencyLevel::Independent: return "independent";
    case DependencyLevel::Dependent: return "dependent";
    case DependencyLevel::HighDependency: return "high_dependency";
  }
  return "independent";
}

Eigen::MatrixXd draw_error_process(DependencyLevel level, const Grid& grid,
                                   int n, std::mt19937_64& rng) {
  if (level == DependencyLevel::Independent) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd eps(n, grid.size());
    for (long i = 0; i < eps.rows(); ++i) {
      for (long j = 0; j < eps.cols(); ++j) eps(i, j) = normal(rng);
    }
    return eps;
  }
  RandomSplineDef def;
  def.degree = 3;
  def.n_basis = 20;
  def.scale = 1.0;
  def.a = grid.min();
  def.b = grid.max();
  if (level == DependencyLevel::Dependent) {
    def.penalized = false;
  } else {
    def.penalized = true;
    def.diff_order = 1;
    def.smoothness = 0.5;
  }
  Eigen::MatrixXd basis = random_spline_basis(def, grid);
  // Standardize to pointwise variance one: divide by sqrt(b(t)'b(t)).
  Eigen::VectorXd sd = basis.rowwise().norm();
  Eigen::MatrixXd draws = draw_random_spline(def, grid, n, rng);
  for (long j = 0; j < draws.cols(); ++j) {
    draws.col(j) /= sd[j];
  }
  return draws;
}

Eigen::MatrixXd draw_gaussian_curves(const Eigen::MatrixXd& mu,
                                     const Eigen::MatrixXd& sigma,
                                     DependencyLevel level, const Grid& grid,
                                     std::mt19937_64& rng) {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols() ||
      mu.cols() != grid.size()) {
    throw DimensionError("draw_gaussian_curves: shape mismatch");
  }
  Eigen::MatrixXd eps =
      draw_error_process(level, grid, static_cast<int>(mu.rows()), rng);
  return mu + sigma.cwiseProduct(eps);
}

Eigen::MatrixXd draw_general_curves(
    const Family& family, const std::vector<Eigen::MatrixXd>& theta_surfaces,
    DependencyLevel level, const Grid& grid, std::mt19937_64& rng) {
  if (static_cast<int>(theta_surfaces.size()) != family.n_parameters()) {
    throw DimensionError("parameter surfaces do not match family");
  }
  const long n = theta_surfaces[0].rows(), g = theta_surfaces[0].cols();
  if (g != grid.size()) throw DimensionError("grid does not match surfaces");
  Eigen::MatrixXd eps = draw_error_process(level, grid, static_cast<int>(n), rng);
  boost::math::normal_distribution<double> std_normal;

  Eigen::MatrixXd y(n, g);
  Eigen::VectorXd theta(family.n_parameters());
  for (long i = 0; i < n; ++i) {
    for (long t = 0; t < g; ++t) {
      for (int q = 0; q < family.n_parameters(); ++q) {
        theta[q] = theta_surfaces[static_cast<size_t>(q)](i, t);
      }
      const double u = std::clamp(boost::math::cdf(std_normal, eps(i, t)),
                                  1e-12, 1.0 - 1e-12);
      y(i, t) = family.quantile(u, theta);
    }
  }
  return y;
}

}  // namespace fb
