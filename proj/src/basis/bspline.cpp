#include "basis/bspline.hpp"

#include <cmath>

namespace fb {

std::vector<double> SplineBasisDef::knots() const {
  const int k = n_basis;
  const int l = degree;
  const double h = (b - a) / static_cast<double>(k - l);
  std::vector<double> t(static_cast<size_t>(k + l + 1));
  for (int i = 0; i <= k + l; ++i) {
    t[static_cast<size_t>(i)] = a + h * static_cast<double>(i - l);
  }
  return t;
}

Eigen::MatrixXd eval_bspline_basis(const SplineBasisDef& def,
                                   const Eigen::VectorXd& points) {
  const int K = def.n_basis;
  const int l = def.degree;
  const auto t = def.knots();
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(def.a), std::abs(def.b)));

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.size(), K);
  std::vector<double> nvals(static_cast<size_t>(l + 1));

  for (long p = 0; p < points.size(); ++p) {
    double x = points[p];
    if (x < def.a - tol || x > def.b + tol) {
      throw RangeError("point " + std::to_string(x) + " outside basis range [" +
                       std::to_string(def.a) + ", " + std::to_string(def.b) + "]");
    }
    x = std::min(std::max(x, def.a), def.b);

    // Knot span j with t[j] <= x < t[j+1]; x == b falls into the last
    // interior span [t[K-1], t[K]].
    int j = l;
    while (j < K - 1 && x >= t[static_cast<size_t>(j + 1)]) ++j;

    // Local de Boor recursion: nvals holds N_{j-l..j, deg} at the end.
    nvals.assign(static_cast<size_t>(l + 1), 0.0);
    nvals[0] = 1.0;
    for (int deg = 1; deg <= l; ++deg) {
      double saved = 0.0;
      for (int r = 0; r < deg; ++r) {
        const int idx = j - deg + 1 + r;
        const double left = t[static_cast<size_t>(idx)];
        const double right = t[static_cast<size_t>(idx + deg)];
        const double term = nvals[static_cast<size_t>(r)] / (right - left);
        nvals[static_cast<size_t>(r)] = saved + (right - x) * term;
        saved = (x - left) * term;
      }
      nvals[static_cast<size_t>(deg)] = saved;
    }
    for (int r = 0; r <= l; ++r) {
      out(p, j - l + r) = nvals[static_cast<size_t>(r)];
    }
  }
  return out;
}

Eigen::MatrixXd difference_operator(int K, int d) {
  if (d < 1 || d >= K) {
    throw DimensionError("difference order must satisfy 1 <= d < K");
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(K, K);
  for (int order = 0; order < d; ++order) {
    const long rows = D.rows() - 1;
    Eigen::MatrixXd next(rows, K);
    for (long r = 0; r < rows; ++r) next.row(r) = D.row(r + 1) - D.row(r);
    D = std::move(next);
  }
  return D;
}

Eigen::MatrixXd difference_penalty(int K, int d) {
  const Eigen::MatrixXd D = difference_operator(K, d);
  return D.transpose() * D;
}

}  // namespace fb
