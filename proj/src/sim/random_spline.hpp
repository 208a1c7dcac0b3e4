#ifndef FB_SIM_RANDOM_SPLINE_HPP
#define FB_SIM_RANDOM_SPLINE_HPP

#include <Eigen/Dense>
#include <random>
#include <string>

#include "core/dataset.hpp"
#include "family/family.hpp"

namespace fb {

// Random spline r(t) = b(t)' theta with theta ~ N(0, I) and
// b(t)' = btilde(t)' Omega W, so that the mean pointwise variance over the
// grid equals `scale` and the share of variance in the penalty null space
// equals `smoothness`.
struct RandomSplineDef {
  int degree = 3;
  int n_basis = 8;
  int diff_order = 2;
  double scale = 1.0;       // mean pointwise variance
  double smoothness = 0.8;  // null-space variance share, in [0, 1]
  bool penalized = true;    // false: i.i.d. raw-basis coefficients
  double a = 0.0;
  double b = 1.0;
};

// [L : D'(DD')^-1] with L the orthonormalized polynomials of orders 0..d-1;
// transforms the difference penalty D'D to diag(0,...,0,1,...,1).
Eigen::MatrixXd build_omega(int K, int d);

// Diagonal of W given the transformed basis btilde*Omega evaluated on a grid
// (G x K); first d entries weight the unpenalized subspace.
Eigen::VectorXd build_weight_matrix(double scale, double smoothness,
                                    const Eigen::MatrixXd& btilde_omega,
                                    int d);

// G x K matrix b(t)' rows with all transforms applied.
Eigen::MatrixXd random_spline_basis(const RandomSplineDef& def,
                                    const Grid& grid);

// n independent draws, one per row.
Eigen::MatrixXd draw_random_spline(const RandomSplineDef& def,
                                   const Grid& grid, int n,
                                   std::mt19937_64& rng);

enum class DependencyLevel { Independent, Dependent, HighDependency };

DependencyLevel dependency_from_name(const std::string& name);
std::string dependency_name(DependencyLevel level);

// Standardized error process: pointwise variance 1. Independent draws i.i.d.
// standard normals; the dependent levels draw standardized random splines.
Eigen::MatrixXd draw_error_process(DependencyLevel level, const Grid& grid,
                                   int n, std::mt19937_64& rng);

// y = mu + sigma * eps with eps the standardized error process.
Eigen::MatrixXd draw_gaussian_curves(const Eigen::MatrixXd& mu,
                                     const Eigen::MatrixXd& sigma,
                                     DependencyLevel level, const Grid& grid,
                                     std::mt19937_64& rng);

// Inverse transform sampling: y = F^-1(Phi(eps) | theta(t)).
Eigen::MatrixXd draw_general_curves(
    const Family& family, const std::vector<Eigen::MatrixXd>& theta_surfaces,
    DependencyLevel level, const Grid& grid, std::mt19937_64& rng);

}  // namespace fb

#endif
