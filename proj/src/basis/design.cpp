#include "basis/design.hpp"

#include <algorithm>
#include <cmath>

#include "basis/calibrate.hpp"
#include "basis/tensor.hpp"

namespace fb {

namespace {

const ScalarCovariate& scalar_cov(const FunctionalDataset& d,
                                  const std::string& name) {
  const auto& c = d.covariate(name);
  if (!std::holds_alternative<ScalarCovariate>(c)) {
    throw SchemaError("covariate '" + name + "' is not scalar");
  }
  return std::get<ScalarCovariate>(c);
}

const CategoricalCovariate& categorical_cov(const FunctionalDataset& d,
                                            const std::string& name) {
  const auto& c = d.covariate(name);
  if (!std::holds_alternative<CategoricalCovariate>(c)) {
    throw SchemaError("covariate '" + name + "' is not categorical");
  }
  return std::get<CategoricalCovariate>(c);
}

const FunctionalCovariate& functional_cov(const FunctionalDataset& d,
                                          const std::string& name) {
  const auto& c = d.covariate(name);
  if (!std::holds_alternative<FunctionalCovariate>(c)) {
    throw SchemaError("covariate '" + name + "' is not functional");
  }
  return std::get<FunctionalCovariate>(c);
}

// Dummy matrix against a fixed level set; unseen labels are an error.
Eigen::MatrixXd dummy_matrix(const CategoricalCovariate& cov,
                             const std::vector<std::string>& levels) {
  const long n = static_cast<long>(cov.codes.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, static_cast<long>(levels.size()));
  for (long i = 0; i < n; ++i) {
    const std::string& label = cov.levels[static_cast<size_t>(
        cov.codes[static_cast<size_t>(i)])];
    auto it = std::find(levels.begin(), levels.end(), label);
    if (it == levels.end()) {
      throw PredictionError("unseen categorical level '" + label + "'");
    }
    d(i, it - levels.begin()) = 1.0;
  }
  return d;
}

void check_domain_match(const Grid& cov_grid, const Grid& response_grid,
                        const std::string& name) {
  // Historical/concurrent effects integrate over the response time line; the
  // covariate grid must be a prefix of (or equal to) the response grid.
  if (cov_grid.size() > response_grid.size()) {
    throw DomainMismatchError("functional covariate '" + name +
                              "' has more grid points than the response");
  }
  for (int g = 0; g < cov_grid.size(); ++g) {
    if (std::abs(cov_grid[g] - response_grid[g]) > 1e-9) {
      throw DomainMismatchError("grid of '" + name +
                                "' does not coincide with the response domain");
    }
  }
}

double marginal_anchor(const Eigen::MatrixXd& BtB, const Eigen::MatrixXd& P,
                       double df_requested) {
  const int rank = numeric_rank_sym(BtB);
  const int d0 = static_cast<int>(P.rows()) - numeric_rank_sym(P);
  double df = df_requested;
  if (df >= rank - 1e-9) return 0.0;
  if (df <= d0) df = 0.5 * (d0 + rank);
  return df_to_lambda(BtB, P, df);
}

// The scale factor such that trace((B'B + s*P)^-1 B'B) hits the target df.
void calibrate(DesignBlock& block, const Eigen::MatrixXd& BtB) {
  auto& s = block.structure;
  const int rank = numeric_rank_sym(BtB);
  double df = std::min(block.df_target, static_cast<double>(rank));
  const int d0 =
      static_cast<int>(s.penalty_rel.rows()) - numeric_rank_sym(s.penalty_rel);
  if (df <= d0) df = 0.5 * (d0 + rank);
  block.df_effective = df;

  if (s.penalty_rel.isZero(0.0) || df >= rank - 1e-9) {
    block.lambda_scale = 0.0;
    block.df_effective = static_cast<double>(rank);
  } else {
    block.lambda_scale = df_to_lambda(BtB, s.penalty_rel, df);
  }
  block.lambda_x = block.lambda_scale * s.anchor_x;
  block.lambda_y = block.lambda_scale * s.anchor_y;
  block.penalty = block.lambda_scale * s.penalty_rel;
}

// Truncated historical quadrature: weight matrix with one row per response
// grid point, holding the integration weights over the covariate grid.
Eigen::MatrixXd historical_weight_matrix(const Grid& cov_grid,
                                         const Grid& t_grid) {
  Eigen::MatrixXd w(t_grid.size(), cov_grid.size());
  for (int g = 0; g < t_grid.size(); ++g) {
    w.row(g) = trapezoid_weights_truncated(cov_grid, t_grid[g]).transpose();
  }
  return w;
}

}  // namespace

Eigen::VectorXd trapezoid_weights(const Grid& grid) {
  return trapezoid_weights_truncated(grid, grid.max());
}

Eigen::VectorXd trapezoid_weights_truncated(const Grid& grid, double upper) {
  const int m = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  int last = -1;
  for (int i = 0; i < m; ++i) {
    if (grid[i] <= upper + 1e-12) last = i;
  }
  if (last <= 0) return w;  // zero-width integral
  for (int i = 0; i <= last; ++i) {
    double wi = 0.0;
    if (i > 0) wi += 0.5 * (grid[i] - grid[i - 1]);
    if (i < last) wi += 0.5 * (grid[i + 1] - grid[i]);
    w[i] = wi;
  }
  return w;
}

EffectStructure build_effect_structure(const TermDescriptor& term,
                                       const FunctionalDataset& data) {
  EffectStructure s;
  s.term = term;
  const Grid& tg = data.response_grid;

  auto make_time_spline = [&]() {
    s.time_basis = SplineBasisDef(term.degree, term.n_basis_y, tg.min(), tg.max());
    s.k_y = term.n_basis_y;
  };
  auto scalar_range_basis = [&](const std::string& name) {
    const auto& z = scalar_cov(data, name).values;
    double lo = z.minCoeff(), hi = z.maxCoeff();
    if (!(hi > lo)) throw DegenerateColumnError("constant scalar covariate '" + name + "'");
    return SplineBasisDef(term.degree, term.n_basis_x, lo, hi);
  };

  switch (term.kind) {
    case TermKind::FunctionalIntercept: {
      make_time_spline();
      s.k_x = 1;
      break;
    }
    case TermKind::StepIntercept: {
      if (term.changepoints.empty()) {
        throw ConfigError("step_intercept needs change points");
      }
      s.step_edges = term.changepoints;
      std::sort(s.step_edges.begin(), s.step_edges.end());
      for (double cp : s.step_edges) {
        if (cp <= tg.min() || cp >= tg.max()) {
          throw ConfigError("change point outside the response time range");
        }
      }
      s.k_y = static_cast<int>(s.step_edges.size()) + 1;
      s.k_x = 1;
      break;
    }
    case TermKind::LinearScalar: {
      make_time_spline();
      s.k_x = 1;
      break;
    }
    case TermKind::SmoothScalar: {
      make_time_spline();
      s.cov_bases.push_back(scalar_range_basis(term.covariates.at(0)));
      const auto& z = scalar_cov(data, term.covariates.at(0)).values;
      Eigen::MatrixXd raw = eval_bspline_basis(s.cov_bases[0], z);
      auto orth = orthogonalize(raw, Eigen::MatrixXd::Ones(z.size(), 1));
      s.Zx = orth.Z;
      s.k_x = static_cast<int>(s.Zx.cols());
      break;
    }
    case TermKind::GroupIntercept:
    case TermKind::GroupLinear: {
      make_time_spline();
      const auto& g = categorical_cov(data, term.covariates.at(0));
      s.group_levels = g.levels;
      Eigen::MatrixXd dummies = dummy_matrix(g, s.group_levels);
      Eigen::VectorXd z = Eigen::VectorXd::Ones(data.n_curves());
      if (term.kind == TermKind::GroupLinear) {
        z = scalar_cov(data, term.covariates.at(1)).values;
      }
      Eigen::MatrixXd raw = dummies.array().colwise() * z.array();
      Eigen::MatrixXd constraints = z;
      if (!term.center_on.empty()) {
        const auto& parent = categorical_cov(data, term.center_on);
        s.parent_levels = parent.levels;
        Eigen::MatrixXd pd = dummy_matrix(parent, s.parent_levels);
        Eigen::MatrixXd both(raw.rows(), 1 + pd.cols());
        both.col(0) = z;
        both.rightCols(pd.cols()) = pd.array().colwise() * z.array();
        constraints = both;
      }
      auto orth = orthogonalize(raw, constraints);
      s.Zx = orth.Z;
      s.k_x = static_cast<int>(s.Zx.cols());
      break;
    }
    case TermKind::LinearInteraction: {
      make_time_spline();
      s.k_x = 1;
      break;
    }
    case TermKind::SmoothInteraction: {
      make_time_spline();
      s.cov_bases.push_back(scalar_range_basis(term.covariates.at(0)));
      s.cov_bases.push_back(scalar_range_basis(term.covariates.at(1)));
      const auto& z1 = scalar_cov(data, term.covariates.at(0)).values;
      const auto& z2 = scalar_cov(data, term.covariates.at(1)).values;
      Eigen::MatrixXd b1 = eval_bspline_basis(s.cov_bases[0], z1);
      Eigen::MatrixXd b2 = eval_bspline_basis(s.cov_bases[1], z2);
      Eigen::MatrixXd raw = row_tensor(b1, b2);
      Eigen::MatrixXd constraints(raw.rows(), 1 + b1.cols() + b2.cols());
      constraints.col(0).setOnes();
      constraints.middleCols(1, b1.cols()) = b1;
      constraints.rightCols(b2.cols()) = b2;
      auto orth = orthogonalize(raw, constraints);
      s.Zx = orth.Z;
      s.k_x = static_cast<int>(s.Zx.cols());
      break;
    }
    case TermKind::FunctionalLinear: {
      make_time_spline();
      const auto& fc = functional_cov(data, term.covariates.at(0));
      s.cov_bases.push_back(SplineBasisDef(term.degree, term.n_basis_x,
                                           fc.grid.min(), fc.grid.max()));
      s.k_x = term.n_basis_x;
      break;
    }
    case TermKind::Historical: {
      make_time_spline();
      const auto& fc = functional_cov(data, term.covariates.at(0));
      check_domain_match(fc.grid, tg, term.covariates.at(0));
      s.cov_bases.push_back(SplineBasisDef(term.degree, term.n_basis_x,
                                           fc.grid.min(), fc.grid.max()));
      s.k_x = term.n_basis_x;
      break;
    }
    case TermKind::Concurrent: {
      make_time_spline();
      const auto& fc = functional_cov(data, term.covariates.at(0));
      check_domain_match(fc.grid, tg, term.covariates.at(0));
      if (fc.grid.size() != tg.size()) {
        throw DomainMismatchError("concurrent effect needs the covariate on the full response grid");
      }
      s.k_x = 1;
      break;
    }
  }
  s.k_total = s.k_x * s.k_y;
  return s;
}

namespace {

// Time-direction evaluation on the response grid: G x k_y.
Eigen::MatrixXd time_design(const EffectStructure& s, const Grid& tg) {
  if (s.term.kind == TermKind::StepIntercept) {
    Eigen::MatrixXd by = Eigen::MatrixXd::Zero(tg.size(), s.k_y);
    for (int g = 0; g < tg.size(); ++g) {
      int seg = 0;
      while (seg < static_cast<int>(s.step_edges.size()) &&
             tg[g] >= s.step_edges[static_cast<size_t>(seg)]) {
        ++seg;
      }
      by(g, seg) = 1.0;
    }
    return by;
  }
  return eval_bspline_basis(*s.time_basis, tg.as_vector());
}

// Covariate-direction evaluation (time-independent kinds): N x k_x.
Eigen::MatrixXd covariate_design(const EffectStructure& s,
                                 const FunctionalDataset& data) {
  const auto& term = s.term;
  switch (term.kind) {
    case TermKind::FunctionalIntercept:
    case TermKind::StepIntercept:
      return Eigen::MatrixXd::Ones(data.n_curves(), 1);
    case TermKind::LinearScalar:
      return scalar_cov(data, term.covariates.at(0)).values;
    case TermKind::SmoothScalar: {
      const auto& z = scalar_cov(data, term.covariates.at(0)).values;
      return eval_bspline_basis(s.cov_bases[0], z) * s.Zx;
    }
    case TermKind::GroupIntercept:
    case TermKind::GroupLinear: {
      const auto& g = categorical_cov(data, term.covariates.at(0));
      Eigen::MatrixXd dummies = dummy_matrix(g, s.group_levels);
      Eigen::VectorXd z = Eigen::VectorXd::Ones(data.n_curves());
      if (term.kind == TermKind::GroupLinear) {
        z = scalar_cov(data, term.covariates.at(1)).values;
      }
      Eigen::MatrixXd raw = dummies.array().colwise() * z.array();
      return raw * s.Zx;
    }
    case TermKind::LinearInteraction: {
      const auto& z1 = scalar_cov(data, term.covariates.at(0)).values;
      const auto& z2 = scalar_cov(data, term.covariates.at(1)).values;
      return (z1.array() * z2.array()).matrix();
    }
    case TermKind::SmoothInteraction: {
      const auto& z1 = scalar_cov(data, term.covariates.at(0)).values;
      const auto& z2 = scalar_cov(data, term.covariates.at(1)).values;
      Eigen::MatrixXd b1 = eval_bspline_basis(s.cov_bases[0], z1);
      Eigen::MatrixXd b2 = eval_bspline_basis(s.cov_bases[1], z2);
      return row_tensor(b1, b2) * s.Zx;
    }
    case TermKind::FunctionalLinear: {
      const auto& fc = functional_cov(data, term.covariates.at(0));
      Eigen::MatrixXd phi = eval_bspline_basis(s.cov_bases[0], fc.grid.as_vector());
      Eigen::VectorXd w = trapezoid_weights(fc.grid);
      return fc.values * w.asDiagonal() * phi;
    }
    default:
      throw DimensionError("covariate_design: time-dependent term kind");
  }
}

bool is_time_dependent(TermKind k) {
  return k == TermKind::Historical || k == TermKind::Concurrent;
}

}  // namespace

Eigen::MatrixXd evaluate_design(const EffectStructure& s,
                                const FunctionalDataset& data) {
  const Grid& tg = data.response_grid;
  const int n = data.n_curves(), g = tg.size();

  if (!is_time_dependent(s.term.kind)) {
    Eigen::MatrixXd bx = covariate_design(s, data);
    Eigen::MatrixXd by = time_design(s, tg);
    return kronecker_design(bx, by);
  }

  const auto& fc = functional_cov(data, s.term.covariates.at(0));
  check_domain_match(fc.grid, tg, s.term.covariates.at(0));
  Eigen::MatrixXd by = time_design(s, tg);

  if (s.term.kind == TermKind::Concurrent) {
    Eigen::MatrixXd out(static_cast<long>(n) * g, s.k_y);
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < g; ++t) {
        out.row(static_cast<long>(i) * g + t) = fc.values(i, t) * by.row(t);
      }
    }
    return out;
  }

  // Historical: b_x(x_i, t_g) = sum_s w_g(s) x_i(s) phi(s).
  Eigen::MatrixXd phi = eval_bspline_basis(s.cov_bases[0], fc.grid.as_vector());
  Eigen::MatrixXd wmat = historical_weight_matrix(fc.grid, tg);  // G x Gs
  Eigen::MatrixXd out(static_cast<long>(n) * g, s.k_total);
  for (int t = 0; t < g; ++t) {
    // N x k_x covariate design at response time t.
    Eigen::MatrixXd mx = fc.values * wmat.row(t).asDiagonal() * phi;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < s.k_x; ++j) {
        out.block(static_cast<long>(i) * g + t, static_cast<long>(j) * s.k_y, 1,
                  s.k_y) = mx(i, j) * by.row(t);
      }
    }
  }
  return out;
}

DesignBlock build_effect_design(const TermDescriptor& term,
                                const FunctionalDataset& data) {
  DesignBlock block;
  block.structure = build_effect_structure(term, data);
  auto& s = block.structure;
  const Grid& tg = data.response_grid;
  const int n = data.n_curves();

  block.design = evaluate_design(s, data);
  block.df_target = term.df;

  // Per-direction penalties.
  Eigen::MatrixXd p_y = Eigen::MatrixXd::Zero(s.k_y, s.k_y);
  bool y_penalized = false;
  if (s.term.kind == TermKind::StepIntercept) {
    p_y = Eigen::MatrixXd::Identity(s.k_y, s.k_y);  // ridge over segments
    y_penalized = true;
  } else if (term.diff_order >= 1 && term.diff_order < s.k_y) {
    p_y = difference_penalty(s.k_y, term.diff_order);
    y_penalized = true;
  }

  Eigen::MatrixXd p_x = Eigen::MatrixXd::Zero(s.k_x, s.k_x);
  bool x_penalized = false;
  int n_cov_directions = 0;
  switch (term.kind) {
    case TermKind::SmoothScalar: {
      Eigen::MatrixXd raw_p = difference_penalty(term.n_basis_x, term.diff_order);
      p_x = s.Zx.transpose() * raw_p * s.Zx;
      x_penalized = true;
      n_cov_directions = 1;
      break;
    }
    case TermKind::GroupIntercept:
    case TermKind::GroupLinear: {
      // Ridge over (transformed) levels; Zx has orthonormal columns.
      p_x = Eigen::MatrixXd::Identity(s.k_x, s.k_x);
      x_penalized = true;
      n_cov_directions = 1;
      break;
    }
    case TermKind::SmoothInteraction: {
      const int k1 = s.cov_bases[0].n_basis, k2 = s.cov_bases[1].n_basis;
      Eigen::MatrixXd p1 = difference_penalty(k1, term.diff_order);
      Eigen::MatrixXd p2 = difference_penalty(k2, term.diff_order);
      const double df_each = std::sqrt(std::max(term.df, 1.0) / 3.0);
      const auto& z1 = scalar_cov(data, term.covariates.at(0)).values;
      const auto& z2 = scalar_cov(data, term.covariates.at(1)).values;
      Eigen::MatrixXd b1 = eval_bspline_basis(s.cov_bases[0], z1);
      Eigen::MatrixXd b2 = eval_bspline_basis(s.cov_bases[1], z2);
      const double g = tg.size();
      double l1 = marginal_anchor(g * (b1.transpose() * b1), p1, df_each);
      double l2 = marginal_anchor(g * (b2.transpose() * b2), p2, df_each);
      if (l1 == 0.0 && l2 == 0.0) l1 = l2 = 1.0;
      Eigen::MatrixXd raw =
          l1 * kronecker(p1, Eigen::MatrixXd::Identity(k2, k2)) +
          l2 * kronecker(Eigen::MatrixXd::Identity(k1, k1), p2);
      p_x = s.Zx.transpose() * raw * s.Zx;
      x_penalized = true;
      n_cov_directions = 2;
      break;
    }
    case TermKind::FunctionalLinear:
    case TermKind::Historical: {
      p_x = difference_penalty(s.k_x, term.diff_order);
      x_penalized = true;
      n_cov_directions = 1;
      break;
    }
    default:
      break;
  }

  // Anchor the per-direction smoothing at the df split (time direction df 3,
  // remainder distributed over the covariate directions), then calibrate one
  // common scale so the block's hat trace hits the df target.
  s.anchor_x = 0.0;
  s.anchor_y = 0.0;
  if (x_penalized && y_penalized) {
    Eigen::MatrixXd by = time_design(s, tg);
    Eigen::MatrixXd bty = static_cast<double>(n) * (by.transpose() * by);
    const double df_y = 3.0;
    const double df_x = term.df / df_y;  // total over covariate directions
    s.anchor_y = marginal_anchor(bty, p_y, df_y);

    // Expanded covariate-direction cross-product.
    Eigen::MatrixXd btx;
    if (is_time_dependent(term.kind)) {
      // Historical: accumulate over the per-time covariate designs.
      const auto& fc = functional_cov(data, term.covariates.at(0));
      Eigen::MatrixXd phi =
          eval_bspline_basis(s.cov_bases[0], fc.grid.as_vector());
      Eigen::MatrixXd wmat = historical_weight_matrix(fc.grid, tg);
      btx = Eigen::MatrixXd::Zero(s.k_x, s.k_x);
      for (int t = 0; t < tg.size(); ++t) {
        Eigen::MatrixXd mx = fc.values * wmat.row(t).asDiagonal() * phi;
        btx += mx.transpose() * mx;
      }
    } else {
      Eigen::MatrixXd bx = covariate_design(s, data);
      btx = static_cast<double>(tg.size()) * (bx.transpose() * bx);
    }
    s.anchor_x = marginal_anchor(btx, p_x, df_x);
    if (s.anchor_x == 0.0 && s.anchor_y == 0.0) s.anchor_x = s.anchor_y = 1.0;
    (void)n_cov_directions;
  } else if (y_penalized) {
    s.anchor_y = 1.0;
  } else if (x_penalized) {
    s.anchor_x = 1.0;
  }

  s.penalty_rel = Eigen::MatrixXd::Zero(s.k_total, s.k_total);
  if (x_penalized) {
    s.penalty_rel +=
        s.anchor_x * kronecker(p_x, Eigen::MatrixXd::Identity(s.k_y, s.k_y));
  }
  if (y_penalized) {
    s.penalty_rel +=
        s.anchor_y * kronecker(Eigen::MatrixXd::Identity(s.k_x, s.k_x), p_y);
  }

  calibrate(block, block.design.transpose() * block.design);
  return block;
}

void calibrate_block(DesignBlock& block, const Eigen::MatrixXd& design_rows) {
  block.design = design_rows;
  calibrate(block, design_rows.transpose() * design_rows);
}

EffectSurface effect_surface(const EffectStructure& s,
                             const Eigen::VectorXd& theta, const Grid& t_grid,
                             int n_cov_points) {
  if (theta.size() != s.k_total) {
    throw DimensionError("coefficient size does not match block");
  }
  EffectSurface out;
  out.col_axis = t_grid.points();
  Eigen::MatrixXd by = time_design(s, t_grid);  // Ge x k_y
  // theta reshaped: k_x blocks of k_y coefficients; surface = Bx * Theta * By'.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      theta_mat(theta.data(), s.k_x, s.k_y);

  auto finish = [&](const Eigen::MatrixXd& bx,
                    std::vector<std::string> names) {
    out.values = bx * theta_mat * by.transpose();
    out.row_names = std::move(names);
    if (out.row_points.empty()) {
      out.row_points.assign(out.row_names.size(), Eigen::VectorXd());
    }
  };
  auto point1 = [](double v) {
    Eigen::VectorXd p(1);
    p << v;
    return p;
  };

  switch (s.term.kind) {
    case TermKind::FunctionalIntercept:
    case TermKind::StepIntercept: {
      finish(Eigen::MatrixXd::Ones(1, 1), {"intercept"});
      break;
    }
    case TermKind::LinearScalar:
    case TermKind::LinearInteraction: {
      // Coefficient curve beta(t) (effect per unit of the covariate product).
      finish(Eigen::MatrixXd::Ones(1, 1), {"beta"});
      break;
    }
    case TermKind::SmoothScalar: {
      Eigen::VectorXd zs = Eigen::VectorXd::LinSpaced(
          n_cov_points, s.cov_bases[0].a, s.cov_bases[0].b);
      Eigen::MatrixXd bx = eval_bspline_basis(s.cov_bases[0], zs) * s.Zx;
      std::vector<std::string> names;
      for (long i = 0; i < zs.size(); ++i) {
        names.push_back(s.term.covariates.at(0) + "=" + std::to_string(zs[i]));
        out.row_points.push_back(point1(zs[i]));
      }
      finish(bx, std::move(names));
      break;
    }
    case TermKind::GroupIntercept:
    case TermKind::GroupLinear: {
      const long L = static_cast<long>(s.group_levels.size());
      Eigen::MatrixXd bx = Eigen::MatrixXd::Identity(L, L) * 1.0;
      bx = bx * s.Zx;  // beta_g(t) per level (unit covariate for group_linear)
      for (long l = 0; l < L; ++l) out.row_points.push_back(point1(static_cast<double>(l)));
      finish(bx, s.group_levels);
      break;
    }
    case TermKind::SmoothInteraction: {
      const int m = std::max(4, n_cov_points / 4);
      Eigen::VectorXd z1 = Eigen::VectorXd::LinSpaced(m, s.cov_bases[0].a,
                                                      s.cov_bases[0].b);
      Eigen::VectorXd z2 = Eigen::VectorXd::LinSpaced(m, s.cov_bases[1].a,
                                                      s.cov_bases[1].b);
      Eigen::MatrixXd b1 = eval_bspline_basis(s.cov_bases[0], z1);
      Eigen::MatrixXd b2 = eval_bspline_basis(s.cov_bases[1], z2);
      Eigen::MatrixXd bx(m * m, b1.cols() * b2.cols());
      std::vector<std::string> names;
      long r = 0;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j, ++r) {
          bx.row(r) = kronecker(b1.row(i), b2.row(j));
          names.push_back(s.term.covariates.at(0) + "=" + std::to_string(z1[i]) +
                          ";" + s.term.covariates.at(1) + "=" +
                          std::to_string(z2[j]));
          Eigen::VectorXd p(2);
          p << z1[i], z2[j];
          out.row_points.push_back(p);
        }
      }
      finish(bx * s.Zx, std::move(names));
      break;
    }
    case TermKind::FunctionalLinear:
    case TermKind::Historical: {
      // Coefficient surface beta(s, t).
      Eigen::VectorXd ss = Eigen::VectorXd::LinSpaced(
          n_cov_points, s.cov_bases[0].a, s.cov_bases[0].b);
      Eigen::MatrixXd bx = eval_bspline_basis(s.cov_bases[0], ss);
      std::vector<std::string> names;
      for (long i = 0; i < ss.size(); ++i) {
        names.push_back("s=" + std::to_string(ss[i]));
        out.row_points.push_back(point1(ss[i]));
      }
      finish(bx, std::move(names));
      break;
    }
    case TermKind::Concurrent: {
      finish(Eigen::MatrixXd::Ones(1, 1), {"beta"});
      break;
    }
  }
  return out;
}

}  // namespace fb
