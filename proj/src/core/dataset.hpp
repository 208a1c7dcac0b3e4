#ifndef FB_CORE_DATASET_HPP
#define FB_CORE_DATASET_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/errors.hpp"

namespace fb {

// Ordered evaluation grid t_1 < ... < t_G.
class Grid {
public:
  Grid() = default;
  explicit Grid(std::vector<double> points) : points_(std::move(points)) {
    validate();
  }

  const std::vector<double>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int i) const { return points_[static_cast<size_t>(i)]; }
  double min() const { return points_.front(); }
  double max() const { return points_.back(); }

  Eigen::VectorXd as_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(points_.data(),
                                             static_cast<long>(points_.size()));
  }

  static Grid uniform(double a, double b, int n);

private:
  void validate() const;
  std::vector<double> points_;
};

struct ScalarCovariate {
  Eigen::VectorXd values;
};

struct CategoricalCovariate {
  std::vector<std::string> levels;  // sorted, unique
  std::vector<int> codes;           // index into levels, length N

  int n_levels() const { return static_cast<int>(levels.size()); }
  int level_code(const std::string& label) const;  // -1 if unknown
};

struct FunctionalCovariate {
  Eigen::MatrixXd values;  // N x G_s
  Grid grid;
  bool standardized = false;
  // Training statistics; kept so new data can be put on the same scale.
  Eigen::VectorXd center;  // size G_s (empty if never standardized)
  Eigen::VectorXd scale;
};

using Covariate =
    std::variant<ScalarCovariate, CategoricalCovariate, FunctionalCovariate>;

// N response curves on a common grid plus named covariates.
struct FunctionalDataset {
  Eigen::MatrixXd response;  // N x G
  Grid response_grid;
  std::map<std::string, Covariate> covariates;

  int n_curves() const { return static_cast<int>(response.rows()); }
  int grid_size() const { return static_cast<int>(response.cols()); }

  const Covariate& covariate(const std::string& name) const;
  bool has_covariate(const std::string& name) const {
    return covariates.count(name) > 0;
  }

  // Dataset restricted to the given curve indices (repeats allowed).
  FunctionalDataset subset(const std::vector<int>& curve_indices) const;
};

// Pointwise standardization to mean 0 / sd 1 per grid point (denominator N-1).
FunctionalCovariate standardize_functional(const FunctionalCovariate& cov);

// Apply previously computed standardization statistics to new data.
FunctionalCovariate apply_standardization(const FunctionalCovariate& stats,
                                          const FunctionalCovariate& raw);

// Forward first differences divided by grid spacing; drops the last point.
FunctionalCovariate numeric_derivative(const FunctionalCovariate& cov);

}  // namespace fb

#endif
