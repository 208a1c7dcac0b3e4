#include "engine/serialize.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace fb {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> flat(static_cast<size_t>(m.size()));
  for (long i = 0; i < m.rows(); ++i) {
    for (long c = 0; c < m.cols(); ++c) {
      flat[static_cast<size_t>(i * m.cols() + c)] = m(i, c);
    }
  }
  j["data"] = flat;
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<long>(flat.size()) != rows * cols) {
    throw ParseError("matrix payload size mismatch in model artifact");
  }
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long c = 0; c < cols; ++c) {
      m(i, c) = flat[static_cast<size_t>(i * cols + c)];
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<long>(vals.size()));
}

json term_to_json(const TermDescriptor& t) {
  json j;
  j["kind"] = term_kind_name(t.kind);
  j["covariates"] = t.covariates;
  j["label"] = t.label;
  j["degree"] = t.degree;
  j["n_basis_x"] = t.n_basis_x;
  j["n_basis_y"] = t.n_basis_y;
  j["diff_order"] = t.diff_order;
  j["df"] = t.df;
  j["changepoints"] = t.changepoints;
  j["center_on"] = t.center_on;
  return j;
}

TermDescriptor term_from_json(const json& j) {
  TermDescriptor t;
  t.kind = term_kind_from_name(j.at("kind").get<std::string>());
  t.covariates = j.at("covariates").get<std::vector<std::string>>();
  t.label = j.at("label").get<std::string>();
  t.degree = j.at("degree").get<int>();
  t.n_basis_x = j.at("n_basis_x").get<int>();
  t.n_basis_y = j.at("n_basis_y").get<int>();
  t.diff_order = j.at("diff_order").get<int>();
  t.df = j.at("df").get<double>();
  t.changepoints = j.at("changepoints").get<std::vector<double>>();
  t.center_on = j.at("center_on").get<std::string>();
  return t;
}

json spline_to_json(const SplineBasisDef& s) {
  return json{{"degree", s.degree}, {"n_basis", s.n_basis},
              {"a", s.a},           {"b", s.b}};
}

SplineBasisDef spline_from_json(const json& j) {
  return SplineBasisDef(j.at("degree").get<int>(), j.at("n_basis").get<int>(),
                        j.at("a").get<double>(), j.at("b").get<double>());
}

json block_to_json(const DesignBlock& b) {
  json j;
  const auto& s = b.structure;
  j["term"] = term_to_json(s.term);
  if (s.time_basis) j["time_basis"] = spline_to_json(*s.time_basis);
  j["step_edges"] = s.step_edges;
  json cov = json::array();
  for (const auto& c : s.cov_bases) cov.push_back(spline_to_json(c));
  j["cov_bases"] = cov;
  j["group_levels"] = s.group_levels;
  j["parent_levels"] = s.parent_levels;
  j["Zx"] = matrix_to_json(s.Zx);
  j["k_x"] = s.k_x;
  j["k_y"] = s.k_y;
  j["penalty_rel"] = matrix_to_json(s.penalty_rel);
  j["anchor_x"] = s.anchor_x;
  j["anchor_y"] = s.anchor_y;
  j["lambda_scale"] = b.lambda_scale;
  j["lambda_x"] = b.lambda_x;
  j["lambda_y"] = b.lambda_y;
  j["df_target"] = b.df_target;
  j["df_effective"] = b.df_effective;
  return j;
}

DesignBlock block_from_json(const json& j) {
  DesignBlock b;
  auto& s = b.structure;
  s.term = term_from_json(j.at("term"));
  if (j.contains("time_basis")) s.time_basis = spline_from_json(j.at("time_basis"));
  s.step_edges = j.at("step_edges").get<std::vector<double>>();
  for (const auto& c : j.at("cov_bases")) s.cov_bases.push_back(spline_from_json(c));
  s.group_levels = j.at("group_levels").get<std::vector<std::string>>();
  s.parent_levels = j.at("parent_levels").get<std::vector<std::string>>();
  s.Zx = matrix_from_json(j.at("Zx"));
  s.k_x = j.at("k_x").get<int>();
  s.k_y = j.at("k_y").get<int>();
  s.k_total = s.k_x * s.k_y;
  s.penalty_rel = matrix_from_json(j.at("penalty_rel"));
  s.anchor_x = j.at("anchor_x").get<double>();
  s.anchor_y = j.at("anchor_y").get<double>();
  b.lambda_scale = j.at("lambda_scale").get<double>();
  b.lambda_x = j.at("lambda_x").get<double>();
  b.lambda_y = j.at("lambda_y").get<double>();
  b.df_target = j.at("df_target").get<double>();
  b.df_effective = j.at("df_effective").get<double>();
  b.penalty = b.lambda_scale * s.penalty_rel;
  return b;
}

}  // namespace

std::string model_to_json(const FittedModel& model) {
  json j;
  j["format"] = "funboost-model";
  j["version"] = 1;
  j["family"] = model.family->id();
  json spec;
  spec["family_id"] = model.spec.family_id;
  json params = json::array();
  for (const auto& terms : model.spec.per_parameter_terms) {
    json list = json::array();
    for (const auto& t : terms) list.push_back(term_to_json(t));
    params.push_back(list);
  }
  spec["parameters"] = params;
  j["spec"] = spec;
  j["response_grid"] = model.response_grid.points();

  json stats = json::object();
  for (const auto& [name, fc] : model.functional_stats) {
    json s;
    s["grid"] = fc.grid.points();
    s["center"] = vector_to_json(fc.center);
    s["scale"] = vector_to_json(fc.scale);
    stats[name] = s;
  }
  j["functional_stats"] = stats;

  json blocks = json::array();
  json coeff = json::array();
  for (size_t q = 0; q < model.blocks.size(); ++q) {
    json qb = json::array(), qc = json::array();
    for (size_t b = 0; b < model.blocks[q].size(); ++b) {
      qb.push_back(block_to_json(model.blocks[q][b]));
      qc.push_back(vector_to_json(model.state.coefficients[q][b]));
    }
    blocks.push_back(qb);
    coeff.push_back(qc);
  }
  j["blocks"] = blocks;
  j["coefficients"] = coeff;
  j["offsets"] = vector_to_json(model.state.offsets);
  j["risk_path"] = model.state.risk_path;

  json hist = json::array();
  for (const auto& iter : model.state.history) {
    json incs = json::array();
    for (const auto& inc : iter) {
      incs.push_back(json{
          {"q", inc.q}, {"j", inc.j}, {"theta", vector_to_json(inc.theta)}});
    }
    hist.push_back(incs);
  }
  j["history"] = hist;

  j["m_stop"] = model.m_stop;
  json hyper;
  hyper["step_lengths"] = model.hyper.step_lengths;
  hyper["m_stop_max"] = model.hyper.m_stop_max;
  hyper["method"] =
      model.hyper.method == BoostMethod::Noncyclic ? "noncyclic" : "cyclic";
  hyper["seed"] = model.hyper.seed;
  hyper["zero_offsets"] = model.hyper.zero_offsets;
  j["hyper"] = hyper;
  return j.dump();
}

FittedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model artifact: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "funboost-model") {
      throw ParseError("not a model artifact");
    }
    FittedModel model;
    model.family = family_by_id(j.at("family").get<std::string>());
    model.spec.family_id = j.at("spec").at("family_id").get<std::string>();
    for (const auto& terms : j.at("spec").at("parameters")) {
      std::vector<TermDescriptor> list;
      for (const auto& t : terms) list.push_back(term_from_json(t));
      model.spec.per_parameter_terms.push_back(std::move(list));
    }
    model.response_grid =
        Grid(j.at("response_grid").get<std::vector<double>>());

    for (const auto& [name, s] : j.at("functional_stats").items()) {
      FunctionalCovariate fc;
      fc.grid = Grid(s.at("grid").get<std::vector<double>>());
      fc.center = vector_from_json(s.at("center"));
      fc.scale = vector_from_json(s.at("scale"));
      fc.standardized = true;
      model.functional_stats.emplace(name, std::move(fc));
    }

    for (const auto& qb : j.at("blocks")) {
      std::vector<DesignBlock> list;
      for (const auto& b : qb) list.push_back(block_from_json(b));
      model.blocks.push_back(std::move(list));
    }
    for (const auto& qc : j.at("coefficients")) {
      std::vector<Eigen::VectorXd> list;
      for (const auto& c : qc) list.push_back(vector_from_json(c));
      model.state.coefficients.push_back(std::move(list));
    }
    model.state.offsets = vector_from_json(j.at("offsets"));
    model.state.risk_path = j.at("risk_path").get<std::vector<double>>();
    for (const auto& iter : j.at("history")) {
      std::vector<Increment> incs;
      for (const auto& inc : iter) {
        incs.push_back(Increment{inc.at("q").get<int>(), inc.at("j").get<int>(),
                                 vector_from_json(inc.at("theta"))});
      }
      model.state.history.push_back(std::move(incs));
    }
    model.m_stop = j.at("m_stop").get<int>();
    const auto& hy = j.at("hyper");
    model.hyper.step_lengths = hy.at("step_lengths").get<std::vector<double>>();
    model.hyper.m_stop_max = hy.at("m_stop_max").get<int>();
    model.hyper.method = hy.at("method").get<std::string>() == "cyclic"
                             ? BoostMethod::Cyclic
                             : BoostMethod::Noncyclic;
    model.hyper.seed = hy.at("seed").get<std::uint64_t>();
    model.hyper.zero_offsets = hy.at("zero_offsets").get<bool>();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model artifact: ") + e.what());
  }
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model artifact to " + path);
  out << model_to_json(model);
  if (!out) throw DataError("write failure on " + path);
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model artifact from " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace fb
