#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace fb {

void Grid::validate() const {
  if (points_.size() < 2) {
    throw GridError("grid needs at least 2 points, got " +
                    std::to_string(points_.size()));
  }
  for (size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw GridError("grid not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

Grid Grid::uniform(double a, double b, int n) {
  std::vector<double> pts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  }
  return Grid(std::move(pts));
}

int CategoricalCovariate::level_code(const std::string& label) const {
  auto it = std::find(levels.begin(), levels.end(), label);
  if (it == levels.end()) return -1;
  return static_cast<int>(it - levels.begin());
}

const Covariate& FunctionalDataset::covariate(const std::string& name) const {
  auto it = covariates.find(name);
  if (it == covariates.end()) {
    throw SchemaError("unknown covariate '" + name + "'");
  }
  return it->second;
}

FunctionalDataset FunctionalDataset::subset(
    const std::vector<int>& curve_indices) const {
  FunctionalDataset out;
  out.response_grid = response_grid;
  const long n = static_cast<long>(curve_indices.size());
  out.response.resize(n, response.cols());
  for (long r = 0; r < n; ++r) {
    int idx = curve_indices[static_cast<size_t>(r)];
    if (idx < 0 || idx >= n_curves()) {
      throw DataError("curve index out of range: " + std::to_string(idx));
    }
    out.response.row(r) = response.row(idx);
  }
  for (const auto& [name, cov] : covariates) {
    if (std::holds_alternative<ScalarCovariate>(cov)) {
      const auto& sc = std::get<ScalarCovariate>(cov);
      ScalarCovariate s;
      s.values.resize(n);
      for (long r = 0; r < n; ++r)
        s.values[r] = sc.values[curve_indices[static_cast<size_t>(r)]];
      out.covariates.emplace(name, std::move(s));
    } else if (std::holds_alternative<CategoricalCovariate>(cov)) {
      const auto& cc = std::get<CategoricalCovariate>(cov);
      CategoricalCovariate c;
      c.levels = cc.levels;
      c.codes.resize(static_cast<size_t>(n));
      for (long r = 0; r < n; ++r)
        c.codes[static_cast<size_t>(r)] =
            cc.codes[static_cast<size_t>(curve_indices[static_cast<size_t>(r)])];
      out.covariates.emplace(name, std::move(c));
    } else {
      const auto& fc = std::get<FunctionalCovariate>(cov);
      FunctionalCovariate f;
      f.grid = fc.grid;
      f.standardized = fc.standardized;
      f.center = fc.center;
      f.scale = fc.scale;
      f.values.resize(n, fc.values.cols());
      for (long r = 0; r < n; ++r)
        f.values.row(r) = fc.values.row(curve_indices[static_cast<size_t>(r)]);
      out.covariates.emplace(name, std::move(f));
    }
  }
  return out;
}

FunctionalCovariate standardize_functional(const FunctionalCovariate& cov) {
  const long n = cov.values.rows();
  const long g = cov.values.cols();
  if (n < 2) throw DataError("standardization needs at least 2 curves");

  FunctionalCovariate out;
  out.grid = cov.grid;
  out.center.resize(g);
  out.scale.resize(g);
  out.values.resize(n, g);
  for (long j = 0; j < g; ++j) {
    const double mean = cov.values.col(j).mean();
    const double ss = (cov.values.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw DegenerateColumnError("zero pointwise variance at grid index " +
                                  std::to_string(j));
    }
    out.center[j] = mean;
    out.scale[j] = sd;
    out.values.col(j) = (cov.values.col(j).array() - mean) / sd;
  }
  out.standardized = true;
  return out;
}

FunctionalCovariate apply_standardization(const FunctionalCovariate& stats,
                                          const FunctionalCovariate& raw) {
  if (stats.center.size() != raw.values.cols()) {
    throw DimensionError("standardization statistics do not match grid size");
  }
  FunctionalCovariate out;
  out.grid = raw.grid;
  out.center = stats.center;
  out.scale = stats.scale;
  out.values = (raw.values.rowwise() - stats.center.transpose()).array().rowwise() /
               stats.scale.transpose().array();
  out.standardized = true;
  return out;
}

FunctionalCovariate numeric_derivative(const FunctionalCovariate& cov) {
  const long g = cov.values.cols();
  if (g < 2) throw GridError("derivative needs at least 2 grid points");
  FunctionalCovariate out;
  const auto& pts = cov.grid.points();
  std::vector<double> new_pts(pts.begin(), pts.end() - 1);
  out.grid = Grid(std::move(new_pts));
  out.values.resize(cov.values.rows(), g - 1);
  for (long j = 0; j + 1 < g; ++j) {
    const double h = pts[static_cast<size_t>(j + 1)] - pts[static_cast<size_t>(j)];
    out.values.col(j) = (cov.values.col(j + 1) - cov.values.col(j)) / h;
  }
  return out;
}

}  // namespace fb
