#ifndef FB_BASIS_DESIGN_HPP
#define FB_BASIS_DESIGN_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "basis/bspline.hpp"
#include "core/dataset.hpp"
#include "core/model_spec.hpp"

namespace fb {

// Everything needed to re-evaluate one effect's design matrix on new data:
// frozen basis ranges, transforms and level sets from the training build.
struct EffectStructure {
  TermDescriptor term;

  std::optional<SplineBasisDef> time_basis;  // spline-in-t blocks
  std::vector<double> step_edges;            // step intercept change points

  std::vector<SplineBasisDef> cov_bases;     // covariate spline directions
  std::vector<std::string> group_levels;     // group effects
  std::vector<std::string> parent_levels;    // centering parent (optional)

  // Covariate-direction transform from the raw basis to the centered /
  // orthogonalized basis (identity-size when no constraint applies).
  Eigen::MatrixXd Zx;

  int k_x = 1;       // covariate-direction columns after transforms
  int k_y = 1;       // time-direction columns
  int k_total = 1;

  // Unit-scale relative penalty (anchoring of per-direction smoothing
  // baked in); the calibrated block penalty is lambda_scale * penalty_rel.
  Eigen::MatrixXd penalty_rel;
  double anchor_x = 0.0;  // relative covariate-direction weight
  double anchor_y = 0.0;  // relative time-direction weight
};

// One base-learner's design matrix, penalty and calibrated smoothing.
struct DesignBlock {
  EffectStructure structure;
  Eigen::MatrixXd design;   // (N*G) x K, curve-major row order
  Eigen::MatrixXd penalty;  // K x K, calibrated scale
  double lambda_scale = 0.0;
  double lambda_x = 0.0;
  double lambda_y = 0.0;
  double df_target = 0.0;    // requested df
  double df_effective = 0.0; // achieved df (clamped to rank when needed)
};

// Trapezoid quadrature weights on a grid, optionally truncated at an upper
// integration limit (the boundary cell gets half-weight).
Eigen::VectorXd trapezoid_weights(const Grid& grid);
Eigen::VectorXd trapezoid_weights_truncated(const Grid& grid, double upper);

EffectStructure build_effect_structure(const TermDescriptor& term,
                                       const FunctionalDataset& data);

// Design rows for `data` under a frozen structure; rows ordered curve-major.
Eigen::MatrixXd evaluate_design(const EffectStructure& s,
                                const FunctionalDataset& data);

// Build structure + design + calibrated penalty from training data.
DesignBlock build_effect_design(const TermDescriptor& term,
                                const FunctionalDataset& data);

// Re-calibrate a block's smoothing for a different set of design rows
// (used per resampling fold; the structure stays frozen).
void calibrate_block(DesignBlock& block, const Eigen::MatrixXd& design_rows);

// Effect values on an evaluation lattice, for plotting and metrics.
// Scalar terms: rows = covariate lattice; historical/functional terms:
// rows = s-grid of the coefficient surface; group terms: rows = levels.
struct EffectSurface {
  std::vector<std::string> row_names;
  // Numeric coordinates per row: covariate value(s), s value, or level code;
  // empty vectors for intercept/coefficient-curve rows.
  std::vector<Eigen::VectorXd> row_points;
  std::vector<double> col_axis;  // t values
  Eigen::MatrixXd values;
};

EffectSurface effect_surface(const EffectStructure& s,
                             const Eigen::VectorXd& theta, const Grid& t_grid,
                             int n_cov_points = 40);

}  // namespace fb

#endif
