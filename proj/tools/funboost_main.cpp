// funboost CLI: boosted distributional regression for functional responses.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "funboost.h"

namespace {

struct CommonOpts {
  std::string config;
  std::string data;
  std::string out;
  std::int64_t seed = -1;
  int jobs = 0;
  int mstop = -1;
  std::string method;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_data) {
  cmd->add_option("--config", o.config, "JSON configuration file")
      ->required();
  if (needs_data) {
    cmd->add_option("--data", o.data, "input CSV file")->required();
  }
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--seed", o.seed, "override random seed");
  cmd->add_option("--jobs", o.jobs, "worker threads for resampling");
  cmd->add_option("--mstop", o.mstop, "override number of boosting iterations");
  cmd->add_option("--method", o.method,
                  "override update method (noncyclic|cyclic)");
}

int report(fb_status status) {
  if (status != FB_OK) {
    std::fprintf(stderr, "funboost: error: %s\n", fb_last_error());
  }
  return static_cast<int>(status);
}

const char* method_or_null(const CommonOpts& o) {
  return o.method.empty() ? nullptr : o.method.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boosted distributional regression for functional responses"};
  app.require_subcommand(1);

  CommonOpts fit_o, predict_o, cv_o, sim_o, eval_o;
  CLI::App* fit = app.add_subcommand("fit", "fit a model to training data");
  add_common(fit, fit_o, true);
  CLI::App* predict =
      app.add_subcommand("predict", "predict parameter surfaces for new data");
  add_common(predict, predict_o, true);
  CLI::App* cv = app.add_subcommand(
      "cv", "resample to choose the number of boosting iterations");
  add_common(cv, cv_o, true);
  CLI::App* sim =
      app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim, sim_o, false);
  CLI::App* eval = app.add_subcommand(
      "evaluate", "compare a fitted model against a known truth");
  add_common(eval, eval_o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(FB_E_CONFIG);
  }

  if (fit->parsed()) {
    return report(fb_cmd_fit(fit_o.config.c_str(), fit_o.data.c_str(),
                             fit_o.out.c_str(), fit_o.seed, fit_o.jobs,
                             fit_o.mstop, method_or_null(fit_o)));
  }
  if (predict->parsed()) {
    return report(fb_cmd_predict(
        predict_o.config.c_str(), predict_o.data.c_str(),
        predict_o.out.c_str(), predict_o.seed, predict_o.jobs, predict_o.mstop,
        method_or_null(predict_o)));
  }
  if (cv->parsed()) {
    return report(fb_cmd_cv(cv_o.config.c_str(), cv_o.data.c_str(),
                            cv_o.out.c_str(), cv_o.seed, cv_o.jobs, cv_o.mstop,
                            method_or_null(cv_o)));
  }
  if (sim->parsed()) {
    return report(fb_cmd_simulate(sim_o.config.c_str(), sim_o.out.c_str(),
                                  sim_o.seed, sim_o.jobs, sim_o.mstop,
                                  method_or_null(sim_o)));
  }
  if (eval->parsed()) {
    return report(fb_cmd_evaluate(eval_o.config.c_str(), eval_o.data.c_str(),
                                  eval_o.out.c_str(), eval_o.seed, eval_o.jobs,
                                  eval_o.mstop, method_or_null(eval_o)));
  }
  return static_cast<int>(FB_E_CONFIG);
}
