#include "core/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace fb {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\r' || *(e - 1) == '\t')) --e;
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) {
    throw ParseError("cannot parse number '" + s + "' in " + context);
  }
  return v;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

struct FunctionalColumnBlock {
  std::vector<int> column_indices;
  std::vector<double> grid_values;
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

FunctionalDataset ingest_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input, header expected");
  const auto header = split_line(line);
  const size_t n_cols = header.size();

  std::map<std::string, FunctionalColumnBlock> functional_blocks;
  std::vector<std::pair<std::string, int>> plain_columns;  // name, col index

  for (size_t c = 0; c < n_cols; ++c) {
    const std::string name = trim(header[c]);
    if (name.empty()) throw ParseError("empty header field at column " +
                                       std::to_string(c));
    auto at = name.find('@');
    if (at != std::string::npos) {
      const std::string base = name.substr(0, at);
      const double gv = parse_double(name.substr(at + 1), "header '" + name + "'");
      auto& blk = functional_blocks[base];
      blk.column_indices.push_back(static_cast<int>(c));
      blk.grid_values.push_back(gv);
    } else {
      plain_columns.emplace_back(name, static_cast<int>(c));
    }
  }
  if (functional_blocks.count(schema.response_name) == 0) {
    throw SchemaError("no response columns '" + schema.response_name +
                      "@<t>' found in header");
  }

  // Grids are taken in header order and must already be monotone.
  for (auto& [base, blk] : functional_blocks) {
    for (size_t i = 1; i < blk.grid_values.size(); ++i) {
      if (!(blk.grid_values[i] > blk.grid_values[i - 1])) {
        throw GridError("non-monotone grid for '" + base + "'");
      }
    }
    if (blk.grid_values.size() < 2) {
      throw GridError("functional block '" + base + "' needs >= 2 columns");
    }
  }

  std::vector<std::vector<std::string>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != n_cols) {
      throw ParseError("ragged row at line " + std::to_string(line_no) +
                       ": expected " + std::to_string(n_cols) + " fields, got " +
                       std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  const long n = static_cast<long>(rows.size());
  if (n == 0) throw DataError("no data rows");

  FunctionalDataset ds;
  for (auto& [base, blk] : functional_blocks) {
    Eigen::MatrixXd m(n, static_cast<long>(blk.column_indices.size()));
    for (long r = 0; r < n; ++r) {
      for (size_t c = 0; c < blk.column_indices.size(); ++c) {
        m(r, static_cast<long>(c)) =
            parse_double(rows[static_cast<size_t>(r)]
                             [static_cast<size_t>(blk.column_indices[c])],
                         "column '" + base + "' row " + std::to_string(r + 1));
      }
    }
    if (base == schema.response_name) {
      ds.response = std::move(m);
      ds.response_grid = Grid(blk.grid_values);
    } else {
      FunctionalCovariate fc;
      fc.values = std::move(m);
      fc.grid = Grid(blk.grid_values);
      ds.covariates.emplace(base, std::move(fc));
    }
  }

  for (const auto& [name, col] : plain_columns) {
    if (schema.categorical.count(name)) {
      CategoricalCovariate cc;
      std::vector<std::string> raw(static_cast<size_t>(n));
      for (long r = 0; r < n; ++r)
        raw[static_cast<size_t>(r)] =
            trim(rows[static_cast<size_t>(r)][static_cast<size_t>(col)]);
      cc.levels = raw;
      std::sort(cc.levels.begin(), cc.levels.end());
      cc.levels.erase(std::unique(cc.levels.begin(), cc.levels.end()),
                      cc.levels.end());
      cc.codes.resize(static_cast<size_t>(n));
      for (long r = 0; r < n; ++r) {
        int code = cc.level_code(raw[static_cast<size_t>(r)]);
        if (code < 0)
          throw SchemaError("unknown level in column '" + name + "'");
        cc.codes[static_cast<size_t>(r)] = code;
      }
      ds.covariates.emplace(name, std::move(cc));
    } else {
      ScalarCovariate sc;
      sc.values.resize(n);
      for (long r = 0; r < n; ++r) {
        sc.values[r] =
            parse_double(rows[static_cast<size_t>(r)][static_cast<size_t>(col)],
                         "column '" + name + "' row " + std::to_string(r + 1));
      }
      ds.covariates.emplace(name, std::move(sc));
    }
  }
  return ds;
}

FunctionalDataset ingest_csv_file(const std::string& path,
                                  const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ingest_csv(in, schema);
}

void write_csv(std::ostream& out, const FunctionalDataset& ds,
               const std::string& response_name) {
  // Header: response block, functional blocks, then plain columns.
  bool first = true;
  auto emit = [&](const std::string& s) {
    if (!first) out << ',';
    out << s;
    first = false;
  };
  for (int g = 0; g < ds.grid_size(); ++g)
    emit(response_name + "@" + format_double(ds.response_grid[g]));
  for (const auto& [name, cov] : ds.covariates) {
    if (std::holds_alternative<FunctionalCovariate>(cov)) {
      const auto& fc = std::get<FunctionalCovariate>(cov);
      for (int g = 0; g < fc.grid.size(); ++g)
        emit(name + "@" + format_double(fc.grid[g]));
    } else {
      emit(name);
    }
  }
  out << '\n';

  for (int i = 0; i < ds.n_curves(); ++i) {
    first = true;
    for (int g = 0; g < ds.grid_size(); ++g) emit(format_double(ds.response(i, g)));
    for (const auto& [name, cov] : ds.covariates) {
      (void)name;
      if (std::holds_alternative<FunctionalCovariate>(cov)) {
        const auto& fc = std::get<FunctionalCovariate>(cov);
        for (int g = 0; g < fc.grid.size(); ++g)
          emit(format_double(fc.values(i, g)));
      } else if (std::holds_alternative<ScalarCovariate>(cov)) {
        emit(format_double(std::get<ScalarCovariate>(cov).values[i]));
      } else {
        const auto& cc = std::get<CategoricalCovariate>(cov);
        emit(cc.levels[static_cast<size_t>(cc.codes[static_cast<size_t>(i)])]);
      }
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const FunctionalDataset& ds,
                    const std::string& response_name) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_csv(out, ds, response_name);
}

}  // namespace fb
