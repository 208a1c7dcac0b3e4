#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "core/csv.hpp"
#include "core/dataset.hpp"

using namespace fb;

TEST_CASE("csv ingest reshapes response columns into curves") {
  std::istringstream in(
      "y@0,y@1,y@2\n"
      "1,2,3\n"
      "4,5,6\n");
  FunctionalDataset ds = ingest_csv(in);
  CHECK(ds.n_curves() == 2);
  CHECK(ds.grid_size() == 3);
  CHECK(ds.response(0, 0) == doctest::Approx(1.0));
  CHECK(ds.response(1, 2) == doctest::Approx(6.0));
  CHECK(ds.response_grid[1] == doctest::Approx(1.0));
}

TEST_CASE("csv ingest rejects a non-monotone grid header") {
  std::istringstream in(
      "y@2,y@1,y@3\n"
      "1,2,3\n");
  CHECK_THROWS_AS(ingest_csv(in), GridError);
}

TEST_CASE("csv ingest rejects ragged rows") {
  std::istringstream in(
      "y@0,y@1\n"
      "1,2\n"
      "3\n");
  CHECK_THROWS_AS(ingest_csv(in), ParseError);
}

TEST_CASE("csv ingest reads scalar, categorical and functional covariates") {
  std::istringstream in(
      "y@0,y@1,z,grp,x@0,x@0.5\n"
      "1,2,0.25,a,7,8\n"
      "3,4,0.75,b,9,10\n");
  CsvSchema schema;
  schema.categorical.insert("grp");
  FunctionalDataset ds = ingest_csv(in, schema);
  CHECK(std::holds_alternative<ScalarCovariate>(ds.covariate("z")));
  CHECK(std::holds_alternative<CategoricalCovariate>(ds.covariate("grp")));
  CHECK(std::holds_alternative<FunctionalCovariate>(ds.covariate("x")));
  const auto& grp = std::get<CategoricalCovariate>(ds.covariate("grp"));
  CHECK(grp.n_levels() == 2);
  const auto& x = std::get<FunctionalCovariate>(ds.covariate("x"));
  CHECK(x.values.rows() == 2);
  CHECK(x.grid.size() == 2);
}

TEST_CASE("csv write then ingest is the identity on contents") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  FunctionalDataset ds;
  ds.response_grid = Grid::uniform(0.0, 1.0, 5);
  ds.response.resize(4, 5);
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 5; ++j) ds.response(i, j) = nd(rng);
  ScalarCovariate z;
  z.values = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  ds.covariates["z"] = z;
  CategoricalCovariate grp;
  grp.levels = {"a", "b"};
  grp.codes = {0, 1, 1, 0};
  ds.covariates["grp"] = grp;
  FunctionalCovariate x;
  x.grid = Grid::uniform(0.0, 1.0, 3);
  x.values.resize(4, 3);
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 3; ++j) x.values(i, j) = nd(rng);
  ds.covariates["x"] = x;

  std::ostringstream out;
  write_csv(out, ds);
  std::istringstream back(out.str());
  CsvSchema schema;
  schema.categorical.insert("grp");
  FunctionalDataset ds2 = ingest_csv(back, schema);

  CHECK((ds2.response - ds.response).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::get<ScalarCovariate>(ds2.covariate("z")).values ==
        std::get<ScalarCovariate>(ds.covariate("z")).values);
  CHECK(std::get<CategoricalCovariate>(ds2.covariate("grp")).codes ==
        grp.codes);
  CHECK((std::get<FunctionalCovariate>(ds2.covariate("x")).values - x.values)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("standardization rejects zero pointwise variance") {
  FunctionalCovariate cov;
  cov.grid = Grid::uniform(0.0, 1.0, 4);
  cov.values = Eigen::MatrixXd::Constant(3, 4, 5.0);
  CHECK_THROWS_AS(standardize_functional(cov), DegenerateColumnError);
}

TEST_CASE("standardizing a symmetric two-point column gives +-1/sqrt(2)") {
  FunctionalCovariate cov;
  cov.grid = Grid::uniform(0.0, 1.0, 3);
  cov.values.resize(2, 3);
  cov.values.row(0).setConstant(0.0);
  cov.values.row(1).setConstant(2.0);
  FunctionalCovariate out = standardize_functional(cov);
  CHECK(out.standardized);
  for (int j = 0; j < 3; ++j) {
    CHECK(out.values(0, j) == doctest::Approx(-0.7071).epsilon(1e-3));
    CHECK(out.values(1, j) == doctest::Approx(0.7071).epsilon(1e-3));
  }
}

TEST_CASE("standardized columns have mean zero and unit sd") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(3.0, 2.5);
  FunctionalCovariate cov;
  cov.grid = Grid::uniform(0.0, 1.0, 20);
  cov.values.resize(10, 20);
  for (long i = 0; i < 10; ++i)
    for (long j = 0; j < 20; ++j) cov.values(i, j) = nd(rng);
  FunctionalCovariate out = standardize_functional(cov);
  for (int j = 0; j < 20; ++j) {
    const double mean = out.values.col(j).mean();
    const double sd = std::sqrt(
        (out.values.col(j).array() - mean).square().sum() / (10 - 1));
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(sd - 1.0) < 1e-12);
  }
  // Idempotent up to numerical noise.
  FunctionalCovariate twice = standardize_functional(out);
  CHECK((twice.values - out.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("numeric derivative of identity, constant and square curves") {
  FunctionalCovariate cov;
  cov.grid = Grid({0.0, 1.0, 2.0, 3.0});
  cov.values.resize(3, 4);
  cov.values.row(0) = cov.grid.as_vector().transpose();            // s
  cov.values.row(1).setConstant(4.0);                              // const
  cov.values.row(2) = cov.grid.as_vector().array().square().matrix().transpose();
  FunctionalCovariate d = numeric_derivative(cov);
  CHECK(d.values.cols() == 3);
  CHECK(d.grid.size() == 3);
  CHECK(d.grid[2] == doctest::Approx(2.0));
  for (int j = 0; j < 3; ++j) {
    CHECK(d.values(0, j) == doctest::Approx(1.0));
    CHECK(d.values(1, j) == doctest::Approx(0.0));
  }
  CHECK(d.values(2, 0) == doctest::Approx(1.0));
  CHECK(d.values(2, 1) == doctest::Approx(3.0));
  CHECK(d.values(2, 2) == doctest::Approx(5.0));
}

TEST_CASE("grids need at least two points, blocking degenerate derivatives") {
  CHECK_THROWS_AS(Grid({0.5}), GridError);
  CHECK_THROWS_AS(Grid({1.0, 1.0}), GridError);
}

TEST_CASE("dataset subset keeps covariates aligned and allows repeats") {
  FunctionalDataset ds;
  ds.response_grid = Grid::uniform(0.0, 1.0, 2);
  ds.response.resize(3, 2);
  ds.response << 1, 2, 3, 4, 5, 6;
  ScalarCovariate z;
  z.values = Eigen::Vector3d(10, 20, 30);
  ds.covariates["z"] = z;
  FunctionalDataset sub = ds.subset({2, 0, 2});
  CHECK(sub.n_curves() == 3);
  CHECK(sub.response(0, 0) == doctest::Approx(5.0));
  CHECK(sub.response(1, 0) == doctest::Approx(1.0));
  const auto& zz = std::get<ScalarCovariate>(sub.covariate("z"));
  CHECK(zz.values(2) == doctest::Approx(30.0));
}
