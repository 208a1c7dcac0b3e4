#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "funboost.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "funboost_capi_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("null arguments are rejected with a config status") {
  CHECK(fb_cmd_fit(nullptr, "x", "y", -1, 0, -1, nullptr) == FB_E_CONFIG);
  CHECK(std::strlen(fb_last_error()) > 0);
  fb_dataset* ds = nullptr;
  CHECK(fb_dataset_read_csv(nullptr, nullptr, nullptr, &ds) == FB_E_CONFIG);
  CHECK(ds == nullptr);
}

TEST_CASE("missing files map to the data error code") {
  fb_dataset* ds = nullptr;
  CHECK(fb_dataset_read_csv("/nonexistent/file.csv", nullptr, nullptr, &ds) ==
        FB_E_DATA);
  fb_model* model = nullptr;
  CHECK(fb_model_load("/nonexistent/model.json", &model) == FB_E_DATA);
}

TEST_CASE("invalid configs map to the config error code") {
  TempDir tmp;
  write_file(tmp.file("bad.json"), "{not json");
  CHECK(fb_cmd_simulate(tmp.file("bad.json").c_str(),
                        tmp.file("out").c_str(), -1, 0, -1,
                        nullptr) == FB_E_CONFIG);
  write_file(tmp.file("badterm.json"),
             R"({"family":"gaussian",
                 "model":{"parameters":[[{"kind":"mystery"}],[ ]]},
                 "hyper":{"m_stop":1}})");
  write_file(tmp.file("d.csv"), "y@0,y@1\n1,2\n3,4\n");
  const fb_status s =
      fb_cmd_fit(tmp.file("badterm.json").c_str(), tmp.file("d.csv").c_str(),
                 tmp.file("out").c_str(), -1, 0, -1, nullptr);
  CHECK(s == FB_E_CONFIG);
  CHECK(std::string(fb_last_error()).find("kind") != std::string::npos);
}

TEST_CASE("simulate, ingest, fit, save and reload through the C API") {
  TempDir tmp;
  write_file(tmp.file("sim.json"),
             R"({"simulate":{"scenario":"continuous","n":15,"grid":12,
                 "level":"independent","seed":3}})");
  REQUIRE(fb_cmd_simulate(tmp.file("sim.json").c_str(),
                          tmp.file("sim_out").c_str(), -1, 0, -1,
                          nullptr) == FB_OK);
  const std::string data = (tmp.path / "sim_out" / "data.csv").string();
  REQUIRE(fs::exists(data));
  REQUIRE(fs::exists(tmp.path / "sim_out" / "truth.json"));

  fb_dataset* ds = nullptr;
  REQUIRE(fb_dataset_read_csv(data.c_str(), "y", nullptr, &ds) == FB_OK);
  CHECK(fb_dataset_n_curves(ds) == 15);
  CHECK(fb_dataset_grid_size(ds) == 12);
  fb_dataset_free(ds);

  write_file(tmp.file("fit.json"),
             R"({"family":"gaussian",
                 "model":{"parameters":[
                   [{"kind":"functional_intercept"},
                    {"kind":"smooth_scalar","covariates":["z1"],"df":4}],
                   [{"kind":"functional_intercept"}]]},
                 "hyper":{"m_stop":20,"step_length":0.2}})");
  REQUIRE(fb_cmd_fit(tmp.file("fit.json").c_str(), data.c_str(),
                     tmp.file("fit_out").c_str(), -1, 1, -1,
                     nullptr) == FB_OK);
  const std::string model_path = (tmp.path / "fit_out" / "model.json").string();
  REQUIRE(fs::exists(model_path));
  REQUIRE(fs::exists(tmp.path / "fit_out" / "risk_path.csv"));

  fb_model* model = nullptr;
  REQUIRE(fb_model_load(model_path.c_str(), &model) == FB_OK);
  CHECK(fb_model_mstop(model) == 20);
  REQUIRE(fb_model_save(model, tmp.file("copy.json").c_str()) == FB_OK);
  fb_model_free(model);

  write_file(tmp.file("pred.json"),
             "{\"predict\":{\"model\":\"" + model_path + "\"}}");
  REQUIRE(fb_cmd_predict(tmp.file("pred.json").c_str(), data.c_str(),
                         tmp.file("pred_out").c_str(), -1, 0, -1,
                         nullptr) == FB_OK);
  CHECK(fs::exists(tmp.path / "pred_out" / "param_mu.csv"));
  CHECK(fs::exists(tmp.path / "pred_out" / "param_sigma.csv"));
}

TEST_CASE("the mstop override caps prediction iterations") {
  TempDir tmp;
  write_file(tmp.file("sim.json"),
             R"({"simulate":{"scenario":"continuous","n":10,"grid":8,
                 "seed":4}})");
  REQUIRE(fb_cmd_simulate(tmp.file("sim.json").c_str(),
                          tmp.file("sim_out").c_str(), -1, 0, -1,
                          nullptr) == FB_OK);
  const std::string data = (tmp.path / "sim_out" / "data.csv").string();
  write_file(tmp.file("fit.json"),
             R"({"family":"gaussian",
                 "model":{"parameters":[
                   [{"kind":"functional_intercept"}],
                   [{"kind":"functional_intercept"}]]},
                 "hyper":{"m_stop":5}})");
  // Override the iteration budget from the API argument.
  REQUIRE(fb_cmd_fit(tmp.file("fit.json").c_str(), data.c_str(),
                     tmp.file("fit_out").c_str(), -1, 1, 9,
                     nullptr) == FB_OK);
  fb_model* model = nullptr;
  REQUIRE(fb_model_load((tmp.path / "fit_out" / "model.json").string().c_str(),
                        &model) == FB_OK);
  CHECK(fb_model_mstop(model) == 9);
  fb_model_free(model);
}
