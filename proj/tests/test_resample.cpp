#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "resample/resample.hpp"

using namespace fb;

namespace {

FunctionalDataset toy_gaussian(int n, int g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  FunctionalDataset ds;
  ds.response_grid = Grid::uniform(0.0, 1.0, g);
  ds.response.resize(n, g);
  ScalarCovariate z;
  z.values.resize(n);
  for (int i = 0; i < n; ++i) {
    z.values(i) = ud(rng);
    for (int t = 0; t < g; ++t) {
      ds.response(i, t) = 1.0 + 2.0 * z.values(i) + 0.4 * nd(rng);
    }
  }
  ds.covariates["z"] = z;
  return ds;
}

ModelSpec toy_spec() {
  ModelSpec spec;
  spec.family_id = "gaussian";
  TermDescriptor ic;
  ic.kind = TermKind::FunctionalIntercept;
  TermDescriptor sm;
  sm.kind = TermKind::SmoothScalar;
  sm.covariates = {"z"};
  sm.df = 4;
  spec.per_parameter_terms = {{ic, sm}, {ic}};
  return spec;
}

}  // namespace

TEST_CASE("kfold test sets partition the curves") {
  FoldPlan plan = make_folds(10, ResampleMethod::Kfold, 5, 42);
  REQUIRE(plan.folds.size() == 5);
  std::set<int> seen;
  for (const auto& fold : plan.folds) {
    CHECK(fold.test.size() == 2);
    CHECK(fold.train.size() == 8);
    for (int i : fold.test) {
      CHECK(seen.insert(i).second);  // disjoint
      CHECK(std::find(fold.train.begin(), fold.train.end(), i) ==
            fold.train.end());
    }
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("bootstrap folds draw with replacement and test out-of-bag") {
  FoldPlan plan = make_folds(5, ResampleMethod::Bootstrap, 10, 7);
  for (const auto& fold : plan.folds) {
    CHECK(fold.train.size() == 5);
    CHECK(!fold.test.empty());
    for (int i : fold.test) {
      CHECK(std::find(fold.train.begin(), fold.train.end(), i) ==
            fold.train.end());
    }
  }
}

TEST_CASE("subsampling trains on half the curves") {
  FoldPlan plan = make_folds(11, ResampleMethod::Subsampling, 4, 9);
  for (const auto& fold : plan.folds) {
    CHECK(fold.train.size() == 6);  // ceil(11/2)
    CHECK(fold.test.size() == 5);
  }
}

TEST_CASE("fold plans are deterministic under the seed") {
  FoldPlan a = make_folds(20, ResampleMethod::Bootstrap, 6, 123);
  FoldPlan b = make_folds(20, ResampleMethod::Bootstrap, 6, 123);
  FoldPlan c = make_folds(20, ResampleMethod::Bootstrap, 6, 124);
  bool all_equal = true, any_diff = false;
  for (size_t f = 0; f < a.folds.size(); ++f) {
    if (a.folds[f].train != b.folds[f].train) all_equal = false;
    if (a.folds[f].train != c.folds[f].train) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("fold construction rejects degenerate inputs") {
  CHECK_THROWS_AS(make_folds(1, ResampleMethod::Bootstrap, 5, 0), DataError);
  CHECK_THROWS_AS(make_folds(10, ResampleMethod::Kfold, 1, 0), ConfigError);
  CHECK_THROWS_AS(make_folds(4, ResampleMethod::Kfold, 5, 0), ConfigError);
}

TEST_CASE("resample method names round trip") {
  CHECK(resample_method_from_name("boot") == ResampleMethod::Bootstrap);
  CHECK(resample_method_from_name("kfold") == ResampleMethod::Kfold);
  CHECK(resample_method_from_name("subs") == ResampleMethod::Subsampling);
  CHECK(resample_method_name(ResampleMethod::Kfold) == "kfold");
  CHECK_THROWS_AS(resample_method_from_name("loocv"), ConfigError);
}

TEST_CASE("zero-iteration risk matrix equals direct offset-model scoring") {
  FunctionalDataset ds = toy_gaussian(16, 6, 3);
  ModelSpec spec = toy_spec();
  Hyper hyper;
  hyper.m_stop_max = 0;
  FoldPlan plan = make_folds(16, ResampleMethod::Kfold, 4, 5);
  RiskMatrix risk = oob_risk_path(ds, spec, hyper, plan);
  REQUIRE(risk.values.cols() == 1);
  FittedModel tmpl = fit(ds, spec, hyper);
  for (size_t f = 0; f < plan.folds.size(); ++f) {
    REQUIRE(risk.valid[f]);
    FittedModel fold_fit = refit_subset(tmpl, ds, plan.folds[f].train, hyper);
    FunctionalDataset test = ds.subset(plan.folds[f].test);
    ParamSurfaces p = predict(fold_fit, test, 0);
    const double direct =
        mean_curve_loss(*fold_fit.family, test.response, p.predictors);
    CHECK(risk.values(static_cast<long>(f), 0) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("incremental out-of-bag scoring matches direct prediction") {
  FunctionalDataset ds = toy_gaussian(14, 5, 11);
  ModelSpec spec = toy_spec();
  Hyper hyper;
  hyper.m_stop_max = 8;
  FoldPlan plan = make_folds(14, ResampleMethod::Kfold, 2, 17);
  RiskMatrix risk = oob_risk_path(ds, spec, hyper, plan, 2);
  FittedModel tmpl = fit(ds, spec, Hyper{.m_stop_max = 0});
  for (size_t f = 0; f < plan.folds.size(); ++f) {
    FittedModel fold_fit = refit_subset(tmpl, ds, plan.folds[f].train, hyper);
    FunctionalDataset test = ds.subset(plan.folds[f].test);
    for (int m = 0; m <= 8; ++m) {
      ParamSurfaces p = predict(fold_fit, test, m);
      const double direct =
          mean_curve_loss(*fold_fit.family, test.response, p.predictors);
      CHECK(risk.values(static_cast<long>(f), m) ==
            doctest::Approx(direct).epsilon(1e-8));
    }
  }
}

TEST_CASE("stopping selection minimizes the across-fold mean") {
  RiskMatrix risk;
  risk.valid = {true, true};

  // Monotone decreasing -> last iteration.
  risk.values.resize(2, 5);
  risk.values << 5, 4, 3, 2, 1, 6, 5, 4, 3, 2;
  CHECK(select_mstop(risk) == 4);

  // Convex with minimum at 2.
  risk.values << 5, 3, 1, 3, 5, 5, 3, 1, 3, 5;
  CHECK(select_mstop(risk) == 2);

  // Constant -> tie-break to 0.
  risk.values.setConstant(7.0);
  CHECK(select_mstop(risk) == 0);

  // Invalid rows are excluded.
  risk.valid = {false, true};
  risk.values.row(0).setConstant(std::nan(""));
  risk.values.row(1) << 9, 8, 7, 8, 9;
  CHECK(select_mstop(risk) == 2);

  risk.valid = {false, false};
  CHECK_THROWS_AS(select_mstop(risk), ResampleError);
}

TEST_CASE("bootstrap bands order bounds and honor the replicate minimum") {
  FunctionalDataset ds = toy_gaussian(25, 6, 21);
  ModelSpec spec = toy_spec();
  Hyper hyper;
  hyper.m_stop_max = 15;
  FittedModel model = fit(ds, spec, hyper);

  BandOptions bad;
  bad.replicates = 10;
  CHECK_THROWS_AS(bootstrap_bands(model, ds, bad), ConfigError);

  BandOptions opts;
  opts.replicates = 50;
  opts.seed = 33;
  opts.jobs = 2;
  auto bands = bootstrap_bands(model, ds, opts);
  REQUIRE(!bands.empty());
  for (const auto& band : bands) {
    CHECK(band.lower.rows() == band.estimate.values.rows());
    CHECK(((band.upper - band.lower).array() >= -1e-12).all());
  }
}
