#ifndef FB_BASIS_BSPLINE_HPP
#define FB_BASIS_BSPLINE_HPP

#include <Eigen/Dense>
#include <vector>

#include "core/errors.hpp"

namespace fb {

// B-spline basis of degree `degree` with `n_basis` functions on [a, b].
// Knots are equally spaced: n_basis - degree + 1 knots span [a, b], extended
// by `degree` knots on each side.
struct SplineBasisDef {
  int degree = 3;
  int n_basis = 8;
  double a = 0.0;
  double b = 1.0;

  SplineBasisDef() = default;
  SplineBasisDef(int deg, int k, double lo, double hi)
      : degree(deg), n_basis(k), a(lo), b(hi) {
    if (degree < 0) throw DimensionError("spline degree must be >= 0");
    if (n_basis < degree + 1)
      throw DimensionError("need n_basis >= degree + 1");
    if (!(b > a)) throw RangeError("invalid basis range");
  }

  std::vector<double> knots() const;
};

// Rows hold b_1(t_p) ... b_K(t_p) via the Cox-de Boor recursion.
// Throws RangeError for points outside [a, b].
Eigen::MatrixXd eval_bspline_basis(const SplineBasisDef& def,
                                   const Eigen::VectorXd& points);

// D'D for the d-th order difference operator D ((K-d) x K).
Eigen::MatrixXd difference_penalty(int K, int d);

// The d-th order difference operator itself.
Eigen::MatrixXd difference_operator(int K, int d);

}  // namespace fb

#endif
