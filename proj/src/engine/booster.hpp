#ifndef FB_ENGINE_BOOSTER_HPP
#define FB_ENGINE_BOOSTER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "basis/design.hpp"
#include "core/dataset.hpp"
#include "core/model_spec.hpp"
#include "family/family.hpp"

namespace fb {

enum class BoostMethod { Noncyclic, Cyclic };

struct Hyper {
  std::vector<double> step_lengths{0.1};  // per parameter; size 1 broadcasts
  int m_stop_max = 100;
  BoostMethod method = BoostMethod::Noncyclic;
  std::uint64_t seed = 0;
  bool zero_offsets = false;

  double step_length(int q) const {
    return step_lengths.size() == 1 ? step_lengths[0]
                                    : step_lengths.at(static_cast<size_t>(q));
  }
  void validate(int n_parameters) const;
};

// One applied base-learner update: parameter q, learner j, and the unscaled
// least-squares solution (the applied increment is step_length(q) * theta).
struct Increment {
  int q = 0;
  int j = 0;
  Eigen::VectorXd theta;
};

struct BoostState {
  Eigen::VectorXd offsets;                              // per parameter
  std::vector<std::vector<Eigen::VectorXd>> coefficients;  // [q][j]
  std::vector<std::vector<Increment>> history;          // per iteration
  std::vector<double> risk_path;  // mean per-curve loss, length iters + 1
};

// Q predictor matrices (N x G, link scale) and the implied parameter values.
struct ParamSurfaces {
  std::vector<Eigen::MatrixXd> predictors;
  std::vector<Eigen::MatrixXd> parameters;
};

struct FittedModel {
  ModelSpec spec;
  std::shared_ptr<const Family> family;
  Grid response_grid;
  std::vector<std::vector<DesignBlock>> blocks;  // [q][j]
  BoostState state;
  int m_stop = 0;
  Hyper hyper;
  // Standardization statistics for functional covariates (training scale).
  std::map<std::string, FunctionalCovariate> functional_stats;
};

Eigen::VectorXd offset_init(const Family& family,
                            const FunctionalDataset& data);

// Penalized least-squares fit (B'B + P) theta = B'u.
Eigen::VectorXd fit_base_learner(const DesignBlock& block,
                                 const Eigen::VectorXd& u);

// Called after each iteration with the applied increments; used for
// incremental out-of-bag scoring.
using IterationCallback =
    std::function<void(int m, const std::vector<Increment>& increments)>;

FittedModel fit(const FunctionalDataset& data, const ModelSpec& spec,
                const Hyper& hyper,
                const IterationCallback& callback = nullptr);

// Refit on a subset of curves (repeats allowed) with effect structures,
// basis ranges and standardization frozen from a previously fitted template;
// smoothing parameters are recalibrated on the subset's design rows and
// offsets are recomputed from the subset response.
FittedModel refit_subset(const FittedModel& tmpl, const FunctionalDataset& data,
                         const std::vector<int>& curve_indices,
                         const Hyper& hyper,
                         const IterationCallback& callback = nullptr);

// Evaluate the model on new data at iteration m (default: chosen m_stop).
ParamSurfaces predict(const FittedModel& model, const FunctionalDataset& data,
                      std::optional<int> m = std::nullopt);

// Dataset with the model's functional covariates put on the training scale.
FunctionalDataset standardize_for_model(const FittedModel& model,
                                        const FunctionalDataset& data);

// Coefficients replayed from the increment history up to iteration m.
std::vector<std::vector<Eigen::VectorXd>> coefficients_at(
    const FittedModel& model, int m);

// Mean per-curve empirical loss of predictor surfaces against a dataset.
double mean_curve_loss(const Family& family, const Eigen::MatrixXd& response,
                       const std::vector<Eigen::MatrixXd>& predictors);

}  // namespace fb

#endif
