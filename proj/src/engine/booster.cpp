#include "engine/booster.hpp"

#include <cmath>

namespace fb {

namespace {

Eigen::VectorXd flatten_curve_major(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (long i = 0; i < m.rows(); ++i) {
    v.segment(i * m.cols(), m.cols()) = m.row(i).transpose();
  }
  return v;
}

Eigen::MatrixXd unflatten_curve_major(const Eigen::VectorXd& v, long n,
                                      long g) {
  Eigen::MatrixXd m(n, g);
  for (long i = 0; i < n; ++i) {
    m.row(i) = v.segment(i * g, g).transpose();
  }
  return m;
}

double total_loss(const Family& family, const Eigen::VectorXd& y,
                  const Eigen::MatrixXd& h_rows) {
  if (!h_rows.allFinite()) {
    throw DomainError("non-finite predictor during loss evaluation");
  }
  double sum = 0.0;
  for (long k = 0; k < y.size(); ++k) {
    sum += family.loss(y[k], h_rows.col(k));
  }
  return sum;
}

// Cached normal-equation factorization of one base-learner.
struct LearnerCache {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool ok = false;
};

LearnerCache make_cache(const DesignBlock& block) {
  LearnerCache c;
  Eigen::MatrixXd m =
      block.design.transpose() * block.design + block.penalty;
  c.ldlt.compute(m);
  c.ok = (c.ldlt.info() == Eigen::Success);
  return c;
}

Eigen::VectorXd solve_learner(const DesignBlock& block,
                              const LearnerCache& cache,
                              const Eigen::VectorXd& u) {
  if (!cache.ok) throw SingularSystemError("base-learner system not factorizable");
  Eigen::VectorXd rhs = block.design.transpose() * u;
  Eigen::VectorXd theta = cache.ldlt.solve(rhs);
  const Eigen::MatrixXd m =
      block.design.transpose() * block.design + block.penalty;
  const double resid = (m * theta - rhs).norm();
  if (!theta.allFinite() ||
      resid > 1e-6 * std::max(1.0, rhs.norm())) {
    throw SingularSystemError("singular base-learner system");
  }
  return theta;
}

}  // namespace

void Hyper::validate(int n_parameters) const {
  if (step_lengths.empty() ||
      (step_lengths.size() != 1 &&
       static_cast<int>(step_lengths.size()) != n_parameters)) {
    throw ConfigError("step_lengths must have size 1 or Q");
  }
  for (double nu : step_lengths) {
    if (!(nu > 0.0 && nu <= 1.0)) {
      throw ConfigError("step length must lie in (0, 1]");
    }
  }
  if (m_stop_max < 0) throw ConfigError("m_stop_max must be >= 0");
}

Eigen::VectorXd offset_init(const Family& family,
                            const FunctionalDataset& data) {
  if (data.n_curves() == 0) throw DataError("empty dataset");
  return family.offsets(data.response);
}

Eigen::VectorXd fit_base_learner(const DesignBlock& block,
                                 const Eigen::VectorXd& u) {
  if (u.size() != block.design.rows()) {
    throw DimensionError("gradient vector does not match design rows");
  }
  if (!u.allFinite()) throw DomainError("non-finite gradient");
  LearnerCache cache = make_cache(block);
  return solve_learner(block, cache, u);
}

FunctionalDataset standardize_for_model(const FittedModel& model,
                                        const FunctionalDataset& data) {
  FunctionalDataset work = data;
  for (const auto& [name, stats] : model.functional_stats) {
    auto it = work.covariates.find(name);
    if (it == work.covariates.end()) {
      throw SchemaError("missing functional covariate '" + name + "'");
    }
    auto* fc = std::get_if<FunctionalCovariate>(&it->second);
    if (fc == nullptr) {
      throw SchemaError("covariate '" + name + "' is not functional");
    }
    if (!fc->standardized) {
      it->second = apply_standardization(stats, *fc);
    }
  }
  return work;
}

namespace {

// The boosting loop proper; expects model.blocks (with designs evaluated on
// `work` and penalties calibrated), offsets and family to be in place.
void run_boosting(FittedModel& model, const FunctionalDataset& work,
                  const Hyper& hyper, const IterationCallback& callback) {
  const int Q = model.family->n_parameters();
  const long n = work.n_curves(), g = work.grid_size();
  const Eigen::VectorXd y = flatten_curve_major(work.response);

  model.state.coefficients.assign(static_cast<size_t>(Q), {});
  std::vector<std::vector<LearnerCache>> caches(static_cast<size_t>(Q));
  for (int q = 0; q < Q; ++q) {
    for (const auto& block : model.blocks[static_cast<size_t>(q)]) {
      caches[static_cast<size_t>(q)].push_back(make_cache(block));
      model.state.coefficients[static_cast<size_t>(q)].push_back(
          Eigen::VectorXd::Zero(block.structure.k_total));
    }
  }

  Eigen::MatrixXd h(Q, n * g);  // row q = flattened predictor of parameter q
  for (int q = 0; q < Q; ++q) h.row(q).setConstant(model.state.offsets[q]);

  model.state.risk_path.push_back(total_loss(*model.family, y, h) /
                                  static_cast<double>(n));

  auto gradients = [&](int q) {
    Eigen::VectorXd u(y.size());
    for (long k = 0; k < y.size(); ++k) {
      u[k] = -model.family->partial_gradient(q, y[k], h.col(k));
    }
    return u;
  };
  auto best_learner = [&](int q, const Eigen::VectorXd& u, int& best_j,
                          Eigen::VectorXd& best_theta) {
    const auto& qblocks = model.blocks[static_cast<size_t>(q)];
    double best_rss = std::numeric_limits<double>::infinity();
    best_j = -1;
    if (qblocks.empty()) return;  // parameter stays at its offset
    for (int j = 0; j < static_cast<int>(qblocks.size()); ++j) {
      Eigen::VectorXd theta = solve_learner(
          qblocks[static_cast<size_t>(j)],
          caches[static_cast<size_t>(q)][static_cast<size_t>(j)], u);
      const double rss =
          (u - qblocks[static_cast<size_t>(j)].design * theta).squaredNorm();
      if (best_j < 0 || rss < best_rss - 1e-12 * std::max(1.0, best_rss)) {
        best_rss = rss;
        best_j = j;
        best_theta = theta;
      }
    }
  };
  auto apply = [&](int q, int j, const Eigen::VectorXd& theta) {
    const double nu = hyper.step_length(q);
    model.state.coefficients[static_cast<size_t>(q)][static_cast<size_t>(j)] +=
        nu * theta;
    h.row(q) +=
        nu *
        (model.blocks[static_cast<size_t>(q)][static_cast<size_t>(j)].design *
         theta)
            .transpose();
  };

  for (int m = 1; m <= hyper.m_stop_max; ++m) {
    std::vector<Increment> applied;
    try {
      if (hyper.method == BoostMethod::Noncyclic) {
        int sel_q = -1, sel_j = -1;
        Eigen::VectorXd sel_theta;
        double sel_loss = std::numeric_limits<double>::infinity();
        for (int q = 0; q < Q; ++q) {
          Eigen::VectorXd u = gradients(q);
          int j;
          Eigen::VectorXd theta;
          best_learner(q, u, j, theta);
          if (j < 0) continue;
          Eigen::MatrixXd h_cand = h;
          h_cand.row(q) +=
              hyper.step_length(q) *
              (model.blocks[static_cast<size_t>(q)][static_cast<size_t>(j)]
                   .design *
               theta)
                  .transpose();
          const double cand = total_loss(*model.family, y, h_cand);
          if (cand < sel_loss) {  // strict: ties keep smallest q
            sel_loss = cand;
            sel_q = q;
            sel_j = j;
            sel_theta = theta;
          }
        }
        if (sel_q < 0) throw ConfigError("model has no base-learners");
        apply(sel_q, sel_j, sel_theta);
        applied.push_back({sel_q, sel_j, sel_theta});
      } else {
        for (int q = 0; q < Q; ++q) {
          Eigen::VectorXd u = gradients(q);
          int j;
          Eigen::VectorXd theta;
          best_learner(q, u, j, theta);
          if (j < 0) continue;
          apply(q, j, theta);
          applied.push_back({q, j, theta});
        }
      }
      model.state.risk_path.push_back(total_loss(*model.family, y, h) /
                                      static_cast<double>(n));
    } catch (const DomainError& e) {
      throw DomainError("iteration " + std::to_string(m) + ": " + e.what());
    }
    model.state.history.push_back(applied);
    if (callback) callback(m, applied);
  }

  model.m_stop = hyper.m_stop_max;
}

}  // namespace

FittedModel fit(const FunctionalDataset& data, const ModelSpec& spec,
                const Hyper& hyper, const IterationCallback& callback) {
  FittedModel model;
  model.spec = spec;
  model.hyper = hyper;
  model.family = family_by_id(spec.family_id);
  model.response_grid = data.response_grid;
  const int Q = model.family->n_parameters();
  if (spec.n_parameters() != Q) {
    throw ConfigError("model spec has " + std::to_string(spec.n_parameters()) +
                      " parameters but family '" + spec.family_id +
                      "' needs " + std::to_string(Q));
  }
  hyper.validate(Q);

  // Put every functional covariate referenced by the model on the training
  // scale and remember the statistics for prediction.
  FunctionalDataset work = data;
  for (const auto& terms : spec.per_parameter_terms) {
    for (const auto& term : terms) {
      for (const auto& name : term.covariates) {
        auto it = work.covariates.find(name);
        if (it == work.covariates.end()) continue;  // checked during build
        auto* fc = std::get_if<FunctionalCovariate>(&it->second);
        if (fc != nullptr && !fc->standardized &&
            model.functional_stats.count(name) == 0) {
          FunctionalCovariate std_cov = standardize_functional(*fc);
          model.functional_stats.emplace(name, std_cov);
          it->second = std::move(std_cov);
        }
      }
    }
  }

  model.state.offsets = hyper.zero_offsets
                            ? Eigen::VectorXd::Zero(Q)
                            : offset_init(*model.family, work);

  model.blocks.resize(static_cast<size_t>(Q));
  for (int q = 0; q < Q; ++q) {
    for (const auto& term : spec.per_parameter_terms[static_cast<size_t>(q)]) {
      model.blocks[static_cast<size_t>(q)].push_back(
          build_effect_design(term, work));
    }
  }

  run_boosting(model, work, hyper, callback);
  return model;
}

FittedModel refit_subset(const FittedModel& tmpl, const FunctionalDataset& data,
                         const std::vector<int>& curve_indices,
                         const Hyper& hyper, const IterationCallback& callback) {
  FittedModel model;
  model.spec = tmpl.spec;
  model.hyper = hyper;
  model.family = tmpl.family;
  model.response_grid = tmpl.response_grid;
  model.functional_stats = tmpl.functional_stats;
  hyper.validate(model.family->n_parameters());

  FunctionalDataset work =
      standardize_for_model(tmpl, data).subset(curve_indices);

  model.state.offsets = hyper.zero_offsets
                            ? Eigen::VectorXd::Zero(model.family->n_parameters())
                            : offset_init(*model.family, work);

  model.blocks.resize(tmpl.blocks.size());
  for (size_t q = 0; q < tmpl.blocks.size(); ++q) {
    for (const auto& src : tmpl.blocks[q]) {
      DesignBlock block;
      block.structure = src.structure;
      block.df_target = src.df_target;
      calibrate_block(block, evaluate_design(block.structure, work));
      model.blocks[q].push_back(std::move(block));
    }
  }

  run_boosting(model, work, hyper, callback);
  return model;
}

std::vector<std::vector<Eigen::VectorXd>> coefficients_at(
    const FittedModel& model, int m) {
  if (m < 0 || m > static_cast<int>(model.state.history.size())) {
    throw RangeError("iteration " + std::to_string(m) +
                     " outside the fitted range");
  }
  std::vector<std::vector<Eigen::VectorXd>> coeff(model.blocks.size());
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    for (const auto& b : model.blocks[q]) {
      coeff[q].push_back(Eigen::VectorXd::Zero(b.structure.k_total));
    }
  }
  for (int it = 0; it < m; ++it) {
    for (const auto& inc : model.state.history[static_cast<size_t>(it)]) {
      coeff[static_cast<size_t>(inc.q)][static_cast<size_t>(inc.j)] +=
          model.hyper.step_length(inc.q) * inc.theta;
    }
  }
  return coeff;
}

ParamSurfaces predict(const FittedModel& model, const FunctionalDataset& data,
                      std::optional<int> m) {
  FunctionalDataset work = standardize_for_model(model, data);
  const int iter = m.value_or(model.m_stop);
  const bool final_iter =
      iter == static_cast<int>(model.state.history.size());
  std::vector<std::vector<Eigen::VectorXd>> coeff;
  if (!final_iter) coeff = coefficients_at(model, iter);
  const auto& use_coeff = final_iter ? model.state.coefficients : coeff;

  const long n = work.n_curves(), g = work.grid_size();
  ParamSurfaces out;
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    Eigen::VectorXd h_flat =
        Eigen::VectorXd::Constant(n * g, model.state.offsets[static_cast<long>(q)]);
    for (size_t j = 0; j < model.blocks[q].size(); ++j) {
      const Eigen::VectorXd& theta = use_coeff[q][j];
      if (theta.isZero(0.0)) continue;  // never-selected effects drop out
      Eigen::MatrixXd design =
          evaluate_design(model.blocks[q][j].structure, work);
      h_flat += design * theta;
    }
    Eigen::MatrixXd h = unflatten_curve_major(h_flat, n, g);
    Eigen::MatrixXd theta_m = h.unaryExpr([&](double v) {
      return apply_inverse_link(model.family->link(static_cast<int>(q)), v);
    });
    out.predictors.push_back(std::move(h));
    out.parameters.push_back(std::move(theta_m));
  }
  return out;
}

double mean_curve_loss(const Family& family, const Eigen::MatrixXd& response,
                       const std::vector<Eigen::MatrixXd>& predictors) {
  const int Q = family.n_parameters();
  if (static_cast<int>(predictors.size()) != Q) {
    throw DimensionError("predictor surfaces do not match family");
  }
  const long n = response.rows(), g = response.cols();
  Eigen::VectorXd h(Q);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long t = 0; t < g; ++t) {
      for (int q = 0; q < Q; ++q) h[q] = predictors[static_cast<size_t>(q)](i, t);
      sum += family.loss(response(i, t), h);
    }
  }
  return sum / static_cast<double>(n);
}

}  // namespace fb
