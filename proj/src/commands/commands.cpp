#include "commands/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "core/csv.hpp"
#include "engine/booster.hpp"
#include "engine/serialize.hpp"
#include "resample/resample.hpp"
#include "sim/metrics.hpp"
#include "sim/scenarios.hpp"

namespace fb {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
}

template <typename T>
T get_key(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing config key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

CsvSchema schema_from_config(const json& cfg) {
  CsvSchema schema;
  if (cfg.contains("data")) {
    const json& d = cfg.at("data");
    schema.response_name = get_or<std::string>(d, "response", "y");
    for (const auto& name :
         get_or<std::vector<std::string>>(d, "categorical", {})) {
      schema.categorical.insert(name);
    }
  }
  return schema;
}

TermDescriptor term_from_config(const json& j) {
  TermDescriptor t;
  t.kind = term_kind_from_name(get_key<std::string>(j, "kind"));
  t.covariates = get_or<std::vector<std::string>>(j, "covariates", {});
  t.label = get_or<std::string>(j, "label", "");
  t.degree = get_or<int>(j, "degree", t.degree);
  t.n_basis_x = get_or<int>(j, "n_basis_x", t.n_basis_x);
  t.n_basis_y = get_or<int>(j, "n_basis_y", t.n_basis_y);
  t.diff_order = get_or<int>(j, "diff_order", t.diff_order);
  t.df = get_or<double>(j, "df", t.df);
  t.changepoints = get_or<std::vector<double>>(j, "changepoints", {});
  t.center_on = get_or<std::string>(j, "center_on", "");
  return t;
}

ModelSpec spec_from_config(const json& cfg) {
  if (!cfg.contains("model")) throw ConfigError("missing config key 'model'");
  const json& m = cfg.at("model");
  if (m.contains("scenario")) {
    return scenario_model_spec(
        scenario_from_name(get_key<std::string>(m, "scenario")));
  }
  ModelSpec spec;
  spec.family_id = get_key<std::string>(cfg, "family");
  if (!m.contains("parameters") || !m.at("parameters").is_array()) {
    throw ConfigError("config key 'model.parameters' must be a list");
  }
  for (const auto& param : m.at("parameters")) {
    if (!param.is_array()) {
      throw ConfigError("config key 'model.parameters' entries must be term lists");
    }
    std::vector<TermDescriptor> terms;
    for (const auto& t : param) terms.push_back(term_from_config(t));
    spec.per_parameter_terms.push_back(std::move(terms));
  }
  return spec;
}

Hyper hyper_from_config(const json& cfg, const Overrides& ov) {
  Hyper hyper;
  if (cfg.contains("hyper")) {
    const json& h = cfg.at("hyper");
    if (h.contains("step_length")) {
      if (h.at("step_length").is_array()) {
        hyper.step_lengths = get_key<std::vector<double>>(h, "step_length");
      } else {
        hyper.step_lengths = {get_key<double>(h, "step_length")};
      }
    }
    hyper.m_stop_max = get_or<int>(h, "m_stop", hyper.m_stop_max);
    const std::string method = get_or<std::string>(h, "method", "noncyclic");
    if (method == "noncyclic") {
      hyper.method = BoostMethod::Noncyclic;
    } else if (method == "cyclic") {
      hyper.method = BoostMethod::Cyclic;
    } else {
      throw ConfigError("config key 'hyper.method' must be noncyclic or cyclic");
    }
    hyper.seed = get_or<std::uint64_t>(h, "seed", 0);
    hyper.zero_offsets = get_or<bool>(h, "zero_offsets", false);
  }
  if (ov.mstop) hyper.m_stop_max = *ov.mstop;
  if (ov.seed) hyper.seed = *ov.seed;
  if (ov.method) {
    if (*ov.method == "noncyclic") {
      hyper.method = BoostMethod::Noncyclic;
    } else if (*ov.method == "cyclic") {
      hyper.method = BoostMethod::Cyclic;
    } else {
      throw ConfigError("--method must be noncyclic or cyclic");
    }
  }
  return hyper;
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

void write_effect_csv(const std::string& path, const EffectSurface& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "row";
  for (double t : s.col_axis) out << "," << format_double(t);
  out << "\n";
  for (long r = 0; r < s.values.rows(); ++r) {
    out << s.row_names[static_cast<size_t>(r)];
    for (long c = 0; c < s.values.cols(); ++c) {
      out << "," << format_double(s.values(r, c));
    }
    out << "\n";
  }
}

void write_matrix_csv(const std::string& path, const std::string& prefix,
                      const Eigen::MatrixXd& m, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (int c = 0; c < grid.size(); ++c) {
    out << (c ? "," : "") << prefix << "@" << format_double(grid[c]);
  }
  out << "\n";
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << format_double(m(r, c));
    }
    out << "\n";
  }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat(static_cast<size_t>(m.size()));
  for (long i = 0; i < m.rows(); ++i) {
    for (long c = 0; c < m.cols(); ++c) {
      flat[static_cast<size_t>(i * m.cols() + c)] = m(i, c);
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<long>(flat.size()) != rows * cols) {
    throw ParseError("matrix payload size mismatch in manifest");
  }
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long c = 0; c < cols; ++c) {
      m(i, c) = flat[static_cast<size_t>(i * cols + c)];
    }
  }
  return m;
}

void write_truth_manifest(const std::string& path, const ScenarioTruth& truth,
                          ScenarioModel scenario, int n, int g) {
  json j;
  j["format"] = "funboost-truth";
  j["scenario"] = scenario_name(scenario);
  j["family"] = truth.family_id;
  j["level"] = dependency_name(truth.level);
  j["seed"] = truth.seed;
  j["n_curves"] = n;
  j["grid_size"] = g;
  json params = json::array();
  for (const auto& m : truth.parameters) params.push_back(matrix_to_json(m));
  j["parameters"] = params;
  json effects = json::array();
  for (const auto& e : truth.effects) {
    effects.push_back(json{{"q", e.q},
                           {"label", e.label},
                           {"kind", term_kind_name(e.kind)},
                           {"covariates", e.covariates},
                           {"on_data", matrix_to_json(e.on_data)}});
  }
  j["effects"] = effects;
  write_text(path, j.dump());
}

ScenarioTruth read_truth_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth manifest '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid truth manifest: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "funboost-truth") {
      throw ParseError("not a truth manifest");
    }
    ScenarioTruth truth;
    truth.family_id = j.at("family").get<std::string>();
    truth.level = dependency_from_name(j.at("level").get<std::string>());
    truth.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& m : j.at("parameters")) {
      truth.parameters.push_back(matrix_from_json(m));
    }
    for (const auto& e : j.at("effects")) {
      TruthEffect eff;
      eff.q = e.at("q").get<int>();
      eff.label = e.at("label").get<std::string>();
      eff.kind = term_kind_from_name(e.at("kind").get<std::string>());
      eff.covariates = e.at("covariates").get<std::vector<std::string>>();
      eff.on_data = matrix_from_json(e.at("on_data"));
      truth.effects.push_back(std::move(eff));
    }
    return truth;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed truth manifest: ") + e.what());
  }
}

void log_line(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "funboost: " << msg << "\n";
}

}  // namespace

int log_level() {
  const char* env = std::getenv("FUNBOOST_LOG");
  if (env == nullptr || *env == '\0') return 0;
  const std::string v(env);
  if (v == "0" || v == "quiet") return 0;
  if (v == "2" || v == "debug") return 2;
  return 1;
}

void cmd_fit(const std::string& config_path, const std::string& data_path,
             const std::string& out_dir, const Overrides& overrides) {
  json cfg = load_config(config_path);
  CsvSchema schema = schema_from_config(cfg);
  FunctionalDataset data = ingest_csv_file(data_path, schema);
  ModelSpec spec = spec_from_config(cfg);
  if (cfg.contains("family")) {
    spec.family_id = get_key<std::string>(cfg, "family");
  }
  Hyper hyper = hyper_from_config(cfg, overrides);
  ensure_out_dir(out_dir);

  log_line(1, "fitting " + spec.family_id + " model, m_stop_max=" +
                  std::to_string(hyper.m_stop_max));
  FittedModel model = fit(data, spec, hyper);

  if (cfg.contains("resampling")) {
    const json& r = cfg.at("resampling");
    const int folds = get_or<int>(r, "folds", 10);
    if (folds < 2) throw ConfigError("config key 'resampling.folds' must be >= 2");
    FoldPlan plan = make_folds(
        data.n_curves(),
        resample_method_from_name(get_or<std::string>(r, "method", "bootstrap")),
        folds, overrides.seed.value_or(get_or<std::uint64_t>(r, "seed", 0)));
    RiskMatrix risk =
        oob_risk_path(data, spec, hyper, plan, overrides.jobs.value_or(1));
    model.m_stop = select_mstop(risk);
    log_line(1, "selected m_stop=" + std::to_string(model.m_stop));
  }

  save_model(model, (fs::path(out_dir) / "model.json").string());

  std::ofstream risk_out(fs::path(out_dir) / "risk_path.csv");
  risk_out << "iteration,train_risk\n";
  for (size_t m = 0; m < model.state.risk_path.size(); ++m) {
    risk_out << m << "," << format_double(model.state.risk_path[m]) << "\n";
  }

  auto coeff = coefficients_at(model, model.m_stop);
  const auto names = model.family->parameter_names();
  fs::create_directories(fs::path(out_dir) / "effects");
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    for (size_t j = 0; j < model.blocks[q].size(); ++j) {
      EffectSurface s = effect_surface(model.blocks[q][j].structure,
                                       coeff[q][j], model.response_grid);
      const std::string file =
          names[q] + "_" +
          model.blocks[q][j].structure.term.display_label() + ".csv";
      write_effect_csv((fs::path(out_dir) / "effects" / file).string(), s);
    }
  }
}

void cmd_predict(const std::string& config_path, const std::string& data_path,
                 const std::string& out_dir, const Overrides& overrides) {
  json cfg = load_config(config_path);
  if (!cfg.contains("predict")) {
    throw ConfigError("missing config key 'predict'");
  }
  const std::string model_path =
      get_key<std::string>(cfg.at("predict"), "model");
  FittedModel model = load_model(model_path);
  CsvSchema schema = schema_from_config(cfg);
  FunctionalDataset data = ingest_csv_file(data_path, schema);
  ensure_out_dir(out_dir);

  std::optional<int> m;
  if (overrides.mstop) m = *overrides.mstop;
  else if (cfg.at("predict").contains("m")) {
    m = get_key<int>(cfg.at("predict"), "m");
  }
  ParamSurfaces surfaces = predict(model, data, m);
  const auto names = model.family->parameter_names();
  for (size_t q = 0; q < surfaces.parameters.size(); ++q) {
    write_matrix_csv(
        (fs::path(out_dir) / ("param_" + names[q] + ".csv")).string(),
        names[q], surfaces.parameters[q], model.response_grid);
  }
}

void cmd_cv(const std::string& config_path, const std::string& data_path,
            const std::string& out_dir, const Overrides& overrides) {
  json cfg = load_config(config_path);
  CsvSchema schema = schema_from_config(cfg);
  FunctionalDataset data = ingest_csv_file(data_path, schema);
  ModelSpec spec = spec_from_config(cfg);
  if (cfg.contains("family")) {
    spec.family_id = get_key<std::string>(cfg, "family");
  }
  Hyper hyper = hyper_from_config(cfg, overrides);

  if (!cfg.contains("resampling")) {
    throw ConfigError("missing config key 'resampling'");
  }
  const json& r = cfg.at("resampling");
  const int folds = get_or<int>(r, "folds", 10);
  if (folds < 2) throw ConfigError("config key 'resampling.folds' must be >= 2");
  FoldPlan plan = make_folds(
      data.n_curves(),
      resample_method_from_name(get_or<std::string>(r, "method", "bootstrap")),
      folds, overrides.seed.value_or(get_or<std::uint64_t>(r, "seed", 0)));

  ensure_out_dir(out_dir);
  RiskMatrix risk =
      oob_risk_path(data, spec, hyper, plan, overrides.jobs.value_or(1));
  const int m_stop = select_mstop(risk);

  std::ofstream out(fs::path(out_dir) / "risk_matrix.csv");
  out << "fold";
  for (long m = 0; m < risk.values.cols(); ++m) out << ",m" << m;
  out << "\n";
  for (long f = 0; f < risk.values.rows(); ++f) {
    out << f + 1;
    for (long m = 0; m < risk.values.cols(); ++m) {
      out << ",";
      if (risk.valid[static_cast<size_t>(f)]) {
        out << format_double(risk.values(f, m));
      }
    }
    out << "\n";
  }
  write_text((fs::path(out_dir) / "selection.json").string(),
             json{{"m_stop", m_stop}}.dump());
  log_line(1, "selected m_stop=" + std::to_string(m_stop));
}

void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                  const Overrides& overrides) {
  json cfg = load_config(config_path);
  if (!cfg.contains("simulate")) {
    throw ConfigError("missing config key 'simulate'");
  }
  const json& s = cfg.at("simulate");
  const ScenarioModel scenario =
      scenario_from_name(get_or<std::string>(s, "scenario", "continuous"));
  const int n = get_or<int>(s, "n", 100);
  const int g = get_or<int>(s, "grid", 100);
  const DependencyLevel level =
      dependency_from_name(get_or<std::string>(s, "level", "independent"));
  const double scale_mu = get_or<double>(s, "scale_mu", 1.0);
  const double scale_sigma = get_or<double>(s, "scale_sigma", 1.0);
  const std::uint64_t seed =
      overrides.seed.value_or(get_or<std::uint64_t>(s, "seed", 0));

  ScenarioResult result =
      generate_scenario(scenario, n, g, level, scale_mu, scale_sigma, seed);
  ensure_out_dir(out_dir);
  write_csv_file((fs::path(out_dir) / "data.csv").string(), result.data);
  write_truth_manifest((fs::path(out_dir) / "truth.json").string(),
                       result.truth, scenario, n, g);
}

void cmd_evaluate(const std::string& config_path, const std::string& data_path,
                  const std::string& out_dir, const Overrides& overrides) {
  json cfg = load_config(config_path);
  if (!cfg.contains("evaluate")) {
    throw ConfigError("missing config key 'evaluate'");
  }
  const json& e = cfg.at("evaluate");
  FittedModel model = load_model(get_key<std::string>(e, "model"));
  ScenarioTruth truth = read_truth_manifest(get_key<std::string>(e, "truth"));
  if (truth.family_id != model.family->id()) {
    throw EvalError("model family '" + model.family->id() +
                    "' does not match truth family '" + truth.family_id + "'");
  }
  CsvSchema schema = schema_from_config(cfg);
  FunctionalDataset data = ingest_csv_file(data_path, schema);
  ensure_out_dir(out_dir);

  std::optional<int> m;
  if (overrides.mstop) m = *overrides.mstop;
  ParamSurfaces est = predict(model, data, m);
  const double kld = mean_kld(*model.family, truth.parameters, est.parameters);

  std::ofstream out(fs::path(out_dir) / "metrics.csv");
  out << "metric,effect,value,status\n";
  out << "mean_kld,," << format_double(kld) << ",ok\n";

  // Match estimated effects to true effects by parameter, kind and covariates.
  FunctionalDataset standardized = standardize_for_model(model, data);
  auto coeff = coefficients_at(model, m.value_or(model.m_stop));
  const long n = data.n_curves(), g = data.grid_size();
  for (const auto& te : truth.effects) {
    Eigen::MatrixXd est_effect = Eigen::MatrixXd::Zero(n, g);
    for (size_t q = 0; q < model.blocks.size(); ++q) {
      for (size_t j = 0; j < model.blocks[q].size(); ++j) {
        const auto& term = model.blocks[q][j].structure.term;
        if (static_cast<int>(q) == te.q && term.kind == te.kind &&
            term.covariates == te.covariates) {
          Eigen::VectorXd flat =
              evaluate_design(model.blocks[q][j].structure, standardized) *
              coeff[q][j];
          for (long i = 0; i < n; ++i) {
            est_effect.row(i) = flat.segment(i * g, g).transpose();
          }
        }
      }
    }
    const double rmse = effect_rmse(te.on_data, est_effect);
    out << "rmse," << te.label << "," << format_double(rmse) << ",ok\n";
    try {
      const double rel = effect_relrmse(te.on_data, est_effect);
      out << "relrmse," << te.label << "," << format_double(rel) << ",ok\n";
    } catch (const RangeZeroError&) {
      out << "relrmse," << te.label << ",,range_zero\n";
    }
  }
}

}  // namespace fb
