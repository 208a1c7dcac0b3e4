#include "resample/resample.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace fb {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  // Distinct, reproducible stream per (seed, index).
  return std::mt19937_64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

void run_parallel(int n_tasks, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, n_tasks));
  if (jobs == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
        task(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

// Mean per-curve test loss at every iteration, replayed from one fit.
Eigen::VectorXd score_path(const FittedModel& fitted,
                           const FunctionalDataset& test_standardized) {
  const auto& family = *fitted.family;
  const int Q = family.n_parameters();
  const long n = test_standardized.n_curves();
  const long g = test_standardized.grid_size();

  std::vector<std::vector<Eigen::MatrixXd>> designs(fitted.blocks.size());
  for (size_t q = 0; q < fitted.blocks.size(); ++q) {
    for (const auto& b : fitted.blocks[q]) {
      designs[q].push_back(evaluate_design(b.structure, test_standardized));
    }
  }

  Eigen::VectorXd y(n * g);
  for (long i = 0; i < n; ++i) {
    y.segment(i * g, g) = test_standardized.response.row(i).transpose();
  }
  Eigen::MatrixXd h(Q, n * g);
  for (int q = 0; q < Q; ++q) h.row(q).setConstant(fitted.state.offsets[q]);

  auto mean_loss = [&] {
    double sum = 0.0;
    for (long k = 0; k < y.size(); ++k) sum += family.loss(y[k], h.col(k));
    return sum / static_cast<double>(n);
  };

  const int m_max = static_cast<int>(fitted.state.history.size());
  Eigen::VectorXd path(m_max + 1);
  path[0] = mean_loss();
  for (int m = 1; m <= m_max; ++m) {
    for (const auto& inc : fitted.state.history[static_cast<size_t>(m - 1)]) {
      h.row(inc.q) +=
          fitted.hyper.step_length(inc.q) *
          (designs[static_cast<size_t>(inc.q)][static_cast<size_t>(inc.j)] *
           inc.theta)
              .transpose();
    }
    path[m] = mean_loss();
  }
  return path;
}

RiskMatrix oob_risk_from_template(const FittedModel& tmpl,
                                  const FunctionalDataset& data,
                                  const Hyper& hyper, const FoldPlan& plan,
                                  int jobs) {
  const int F = static_cast<int>(plan.folds.size());
  RiskMatrix risk;
  risk.values = Eigen::MatrixXd::Constant(
      F, hyper.m_stop_max + 1, std::numeric_limits<double>::quiet_NaN());
  risk.valid.assign(static_cast<size_t>(F), false);

  FunctionalDataset standardized = standardize_for_model(tmpl, data);
  std::mutex log_mutex;

  run_parallel(F, jobs, [&](int f) {
    const auto& fold = plan.folds[static_cast<size_t>(f)];
    try {
      FittedModel fitted = refit_subset(tmpl, standardized, fold.train, hyper);
      FunctionalDataset test = standardized.subset(fold.test);
      risk.values.row(f) = score_path(fitted, test).transpose();
      risk.valid[static_cast<size_t>(f)] = true;
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "warning: fold " << f + 1 << " failed: " << e.what()
                << "\n";
    }
  });
  return risk;
}

double quantile_type7(std::vector<double>& sorted_values, double p) {
  std::sort(sorted_values.begin(), sorted_values.end());
  const long n = static_cast<long>(sorted_values.size());
  if (n == 1) return sorted_values[0];
  const double idx = p * static_cast<double>(n - 1);
  const long lo = static_cast<long>(std::floor(idx));
  const long hi = std::min(lo + 1, n - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * sorted_values[static_cast<size_t>(lo)] +
         w * sorted_values[static_cast<size_t>(hi)];
}

}  // namespace

ResampleMethod resample_method_from_name(const std::string& name) {
  if (name == "bootstrap" || name == "boot") return ResampleMethod::Bootstrap;
  if (name == "kfold") return ResampleMethod::Kfold;
  if (name == "subsampling" || name == "subs") return ResampleMethod::Subsampling;
  throw ConfigError("unknown resampling method '" + name + "'");
}

std::string resample_method_name(ResampleMethod m) {
  switch (m) {
    case ResampleMethod::Bootstrap: return "bootstrap";
    case ResampleMethod::Kfold: return "kfold";
    case ResampleMethod::Subsampling: return "subsampling";
  }
  return "bootstrap";
}

FoldPlan make_folds(int n_curves, ResampleMethod method, int n_folds,
                    std::uint64_t seed) {
  if (n_curves < 2) throw DataError("resampling needs at least 2 curves");
  if (n_folds < 1) throw ConfigError("n_folds must be >= 1");
  if (method == ResampleMethod::Kfold &&
      (n_folds < 2 || n_folds > n_curves)) {
    throw ConfigError("kfold needs 2 <= n_folds <= N");
  }

  FoldPlan plan;
  plan.method = method;
  plan.n_folds = n_folds;
  plan.seed = seed;

  if (method == ResampleMethod::Kfold) {
    std::vector<int> perm(static_cast<size_t>(n_curves));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng = stream_rng(seed, 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<int>> tests(static_cast<size_t>(n_folds));
    for (int i = 0; i < n_curves; ++i) {
      tests[static_cast<size_t>(i % n_folds)].push_back(perm[static_cast<size_t>(i)]);
    }
    for (int f = 0; f < n_folds; ++f) {
      Fold fold;
      fold.test = tests[static_cast<size_t>(f)];
      std::sort(fold.test.begin(), fold.test.end());
      for (int i = 0; i < n_curves; ++i) {
        if (!std::binary_search(fold.test.begin(), fold.test.end(), i)) {
          fold.train.push_back(i);
        }
      }
      plan.folds.push_back(std::move(fold));
    }
    return plan;
  }

  for (int f = 0; f < n_folds; ++f) {
    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(f));
    Fold fold;
    if (method == ResampleMethod::Bootstrap) {
      std::uniform_int_distribution<int> pick(0, n_curves - 1);
      std::vector<bool> in_bag(static_cast<size_t>(n_curves));
      do {
        fold.train.clear();
        in_bag.assign(static_cast<size_t>(n_curves), false);
        for (int i = 0; i < n_curves; ++i) {
          const int idx = pick(rng);
          fold.train.push_back(idx);
          in_bag[static_cast<size_t>(idx)] = true;
        }
      } while (std::all_of(in_bag.begin(), in_bag.end(),
                           [](bool b) { return b; }));
      for (int i = 0; i < n_curves; ++i) {
        if (!in_bag[static_cast<size_t>(i)]) fold.test.push_back(i);
      }
    } else {  // subsampling: half the curves train, the rest test
      std::vector<int> perm(static_cast<size_t>(n_curves));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const int n_train = (n_curves + 1) / 2;
      fold.train.assign(perm.begin(), perm.begin() + n_train);
      fold.test.assign(perm.begin() + n_train, perm.end());
      std::sort(fold.train.begin(), fold.train.end());
      std::sort(fold.test.begin(), fold.test.end());
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

RiskMatrix oob_risk_path(const FunctionalDataset& data, const ModelSpec& spec,
                         const Hyper& hyper, const FoldPlan& plan, int jobs) {
  // Build structures once on the full data so fold evaluations share basis
  // ranges and standardization.
  Hyper build_only = hyper;
  build_only.m_stop_max = 0;
  FittedModel tmpl = fit(data, spec, build_only);
  return oob_risk_from_template(tmpl, data, hyper, plan, jobs);
}

int select_mstop(const RiskMatrix& risk) {
  const long cols = risk.values.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(cols);
  int n_valid = 0;
  for (long f = 0; f < risk.values.rows(); ++f) {
    if (!risk.valid[static_cast<size_t>(f)] ||
        !risk.values.row(f).allFinite()) {
      continue;
    }
    mean += risk.values.row(f).transpose();
    ++n_valid;
  }
  if (n_valid == 0) throw ResampleError("no valid resampling fold");
  mean /= static_cast<double>(n_valid);
  int best = 0;
  for (long m = 1; m < cols; ++m) {
    if (mean[m] < mean[best]) best = static_cast<int>(m);
  }
  return best;
}

std::vector<EffectBand> bootstrap_bands(const FittedModel& model,
                                        const FunctionalDataset& data,
                                        const BandOptions& options) {
  if (options.replicates < 50) {
    throw ConfigError("bootstrap_bands needs at least 50 replicates");
  }
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw ConfigError("band level must lie in (0, 1)");
  }
  const double alpha = 1.0 - options.level;
  const int n = data.n_curves();

  // Point estimates on the frozen structures.
  auto coeff_hat = coefficients_at(model, model.m_stop);
  std::vector<EffectBand> bands;
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    for (size_t j = 0; j < model.blocks[q].size(); ++j) {
      EffectBand band;
      band.q = static_cast<int>(q);
      band.j = static_cast<int>(j);
      band.label = model.blocks[q][j].structure.term.display_label();
      band.estimate = effect_surface(model.blocks[q][j].structure,
                                     coeff_hat[q][j], model.response_grid);
      bands.push_back(std::move(band));
    }
  }

  FunctionalDataset standardized = standardize_for_model(model, data);
  Hyper hyper = model.hyper;
  if (!options.reselect_mstop) hyper.m_stop_max = model.m_stop;

  // deltas[k][r] = replicate surface - estimate, per effect k.
  std::vector<std::vector<Eigen::MatrixXd>> deltas(bands.size());
  std::mutex merge_mutex;
  std::atomic<int> failures{0};

  run_parallel(options.replicates, options.jobs, [&](int r) {
    try {
      std::mt19937_64 rng = stream_rng(options.seed, static_cast<std::uint64_t>(r));
      std::uniform_int_distribution<int> pick(0, n - 1);
      std::vector<int> idx(static_cast<size_t>(n));
      for (auto& v : idx) v = pick(rng);

      FittedModel fitted = refit_subset(model, standardized, idx, hyper);
      int m_sel = fitted.m_stop;
      if (options.reselect_mstop) {
        FoldPlan inner = make_folds(n, ResampleMethod::Bootstrap,
                                    options.inner_folds,
                                    options.seed + 7919 * (r + 1));
        FunctionalDataset rep = standardized.subset(idx);
        RiskMatrix risk = oob_risk_from_template(model, rep, hyper, inner, 1);
        m_sel = select_mstop(risk);
      }
      auto coeff = coefficients_at(fitted, m_sel);

      std::vector<Eigen::MatrixXd> local(bands.size());
      size_t k = 0;
      for (size_t q = 0; q < fitted.blocks.size(); ++q) {
        for (size_t j = 0; j < fitted.blocks[q].size(); ++j, ++k) {
          EffectSurface s = effect_surface(fitted.blocks[q][j].structure,
                                           coeff[q][j], model.response_grid);
          local[k] = s.values - bands[k].estimate.values;
        }
      }
      std::lock_guard<std::mutex> lock(merge_mutex);
      for (size_t i = 0; i < bands.size(); ++i) {
        deltas[i].push_back(std::move(local[i]));
      }
    } catch (const Error& e) {
      failures.fetch_add(1);
      std::lock_guard<std::mutex> lock(merge_mutex);
      std::cerr << "warning: bootstrap replicate " << r + 1
                << " failed: " << e.what() << "\n";
    }
  });

  if (deltas.empty() || deltas[0].size() < 2) {
    throw ResampleError("too few successful bootstrap replicates");
  }

  for (size_t k = 0; k < bands.size(); ++k) {
    const Eigen::MatrixXd& est = bands[k].estimate.values;
    bands[k].lower.resizeLike(est);
    bands[k].upper.resizeLike(est);
    std::vector<double> cell(deltas[k].size());
    for (long i = 0; i < est.rows(); ++i) {
      for (long c = 0; c < est.cols(); ++c) {
        for (size_t r = 0; r < deltas[k].size(); ++r) cell[r] = deltas[k][r](i, c);
        std::vector<double> tmp = cell;
        const double d_hi = quantile_type7(tmp, 1.0 - alpha / 2.0);
        tmp = cell;
        const double d_lo = quantile_type7(tmp, alpha / 2.0);
        bands[k].lower(i, c) = est(i, c) - d_hi;
        bands[k].upper(i, c) = est(i, c) - d_lo;
      }
    }
  }
  return bands;
}

}  // namespace fb
