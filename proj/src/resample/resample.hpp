#ifndef FB_RESAMPLE_RESAMPLE_HPP
#define FB_RESAMPLE_RESAMPLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "engine/booster.hpp"

namespace fb {

enum class ResampleMethod { Bootstrap, Kfold, Subsampling };

ResampleMethod resample_method_from_name(const std::string& name);
std::string resample_method_name(ResampleMethod m);

struct Fold {
  std::vector<int> train;  // multiset of curve indices
  std::vector<int> test;   // disjoint from train
};

struct FoldPlan {
  ResampleMethod method = ResampleMethod::Bootstrap;
  int n_folds = 10;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

// Curve-level resampling; deterministic under seed. Bootstrap folds with an
// empty out-of-bag set are redrawn.
FoldPlan make_folds(int n_curves, ResampleMethod method, int n_folds,
                    std::uint64_t seed);

struct RiskMatrix {
  // folds x (m_stop_max + 1); rows of failed folds are NaN with valid=false.
  Eigen::MatrixXd values;
  std::vector<bool> valid;
};

// Per fold: fit on the train curves, score the mean per-curve empirical loss
// on the test curves at every iteration 0..m_stop_max (one fit per fold,
// scored incrementally). Folds run concurrently on up to `jobs` threads and
// are merged by fold index.
RiskMatrix oob_risk_path(const FunctionalDataset& data, const ModelSpec& spec,
                         const Hyper& hyper, const FoldPlan& plan,
                         int jobs = 1);

// Argmin over iterations of the across-fold mean risk; ties -> smallest m.
int select_mstop(const RiskMatrix& risk);

struct EffectBand {
  int q = 0;
  int j = 0;
  std::string label;
  EffectSurface estimate;
  Eigen::MatrixXd lower;  // same shape as estimate.values
  Eigen::MatrixXd upper;
};

struct BandOptions {
  int replicates = 100;
  double level = 0.95;
  std::uint64_t seed = 0;
  int jobs = 1;
  // Re-select m_stop per replicate with an inner bootstrap (capped by the
  // training m_stop_max); off by default: replicates reuse model.m_stop.
  bool reselect_mstop = false;
  int inner_folds = 5;
};

// Basic bootstrap bands [f - d*_{1-a/2}, f - d*_{a/2}] with d* the pointwise
// bootstrap quantiles of f* - f; effects never selected in a refit enter as
// zero surfaces.
std::vector<EffectBand> bootstrap_bands(const FittedModel& model,
                                        const FunctionalDataset& data,
                                        const BandOptions& options);

}  // namespace fb

#endif
