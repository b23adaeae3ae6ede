#pragma once

// State files (versioned JSON, matrix as rows of [re, im] pairs) and the
// tabular reports written by the command-line tool (CSV or JSON).

#include "nongauss/error.hpp"
#include "nongauss/fock.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace nongauss {

inline constexpr const char* state_file_format = "nongauss-state";
inline constexpr int state_file_version = 1;

struct StateMetadata {
  std::string family;
  std::map<std::string, double> parameters;
  std::optional<std::uint64_t> seed;
};

struct StateFile {
  FockState state;
  StateMetadata metadata;
};

inline nlohmann::json to_json(const FockState& rho, const StateMetadata& meta = {}) {
  nlohmann::json j;
  j["format"] = state_file_format;
  j["version"] = state_file_version;
  j["modes"] = rho.modes();
  j["cutoffs"] = rho.shape().cutoffs();
  nlohmann::json rows = nlohmann::json::array();
  const cmat& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  nlohmann::json md = nlohmann::json::object();
  if (!meta.family.empty()) md["family"] = meta.family;
  if (!meta.parameters.empty()) md["parameters"] = meta.parameters;
  if (meta.seed) md["seed"] = *meta.seed;
  if (!md.empty()) j["metadata"] = std::move(md);
  return j;
}

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::parse, "field '" + field + "': " + msg);
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) field_error(key, "missing");
  return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

}  // namespace detail

/// Parses and validates a state document. Structural problems are parse
/// errors naming the field; physical problems (Hermiticity, trace,
/// positivity) are validation errors from FockState.
inline StateFile state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) detail::field_error("<root>", "expected an object");
  const auto& format = detail::require(j, "format");
  if (!format.is_string() || format.get<std::string>() != state_file_format) {
    detail::field_error("format", std::string("expected \"") + state_file_format + "\"");
  }
  const auto& version = detail::require(j, "version");
  if (!version.is_number_integer() || version.get<int>() != state_file_version) {
    detail::field_error("version", "unsupported version");
  }
  const auto& modes_j = detail::require(j, "modes");
  if (!modes_j.is_number_integer() || modes_j.get<int>() < 1) detail::field_error("modes", "expected a positive integer");
  const int modes = modes_j.get<int>();
  const auto& cut_j = detail::require(j, "cutoffs");
  if (!cut_j.is_array() || static_cast<int>(cut_j.size()) != modes) {
    detail::field_error("cutoffs", "expected an array of " + std::to_string(modes) + " integers");
  }
  std::vector<int> cutoffs;
  for (std::size_t k = 0; k < cut_j.size(); ++k) {
    if (!cut_j[k].is_number_integer() || cut_j[k].get<int>() < 1) {
      detail::field_error("cutoffs[" + std::to_string(k) + "]", "expected a positive integer");
    }
    cutoffs.push_back(cut_j[k].get<int>());
  }
  ModeShape shape(cutoffs);
  const auto dim = static_cast<std::size_t>(shape.dim());
  const auto& mat_j = detail::require(j, "matrix");
  if (!mat_j.is_array() || mat_j.size() != dim) {
    detail::field_error("matrix", "expected " + std::to_string(dim) + " rows (product of cutoffs)");
  }
  cmat rho(shape.dim(), shape.dim());
  for (std::size_t r = 0; r < dim; ++r) {
    const std::string row_field = "matrix[" + std::to_string(r) + "]";
    if (!mat_j[r].is_array() || mat_j[r].size() != dim) {
      detail::field_error(row_field, "expected " + std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const std::string f = row_field + "[" + std::to_string(c) + "]";
      const auto& e = mat_j[r][c];
      if (!e.is_array() || e.size() != 2) detail::field_error(f, "expected a [re, im] pair");
      rho(r, c) = cplx(detail::number(e[0], f + "[0]"), detail::number(e[1], f + "[1]"));
    }
  }
  StateFile out;
  if (j.contains("metadata")) {
    const auto& md = j.at("metadata");
    if (!md.is_object()) detail::field_error("metadata", "expected an object");
    if (md.contains("family")) {
      if (!md["family"].is_string()) detail::field_error("metadata.family", "expected a string");
      out.metadata.family = md["family"].get<std::string>();
    }
    if (md.contains("parameters")) {
      if (!md["parameters"].is_object()) detail::field_error("metadata.parameters", "expected an object");
      for (const auto& [k, v] : md["parameters"].items()) {
        out.metadata.parameters[k] = detail::number(v, "metadata.parameters." + k);
      }
    }
    if (md.contains("seed")) {
      if (!md["seed"].is_number_unsigned()) detail::field_error("metadata.seed", "expected a non-negative integer");
      out.metadata.seed = md["seed"].get<std::uint64_t>();
    }
  }
  out.state = FockState::from_matrix(std::move(shape), std::move(rho));
  return out;
}

/// Parses state text; syntax errors report line and column.
inline StateFile parse_state(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
  return state_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "read failed for '" + path + "'");
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

inline StateFile load_state(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_state(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + std::string(e.what()));
  }
}

inline void save_state(const std::string& path, const FockState& rho, const StateMetadata& meta = {}) {
  write_text_file(path, to_json(rho, meta).dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw Error(ErrorKind::shape_mismatch, "table '" + name + "': row has " + std::to_string(row.size()) +
                                                 " cells for " + std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& c) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k] == c) return k;
    throw Error(ErrorKind::validation, "table '" + name + "' has no column '" + c + "'");
  }
};

/// One or more tables plus key/value metadata.
struct Report {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Table> tables;
};

/// Fixed 9-significant-digit formatting for floating cells.
inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_cell(row[k]);
    out += '\n';
  }
  return out;
}

/// Metadata as '# key: value' lines; several tables are separated by a
/// blank line and a '# table: name' line.
inline std::string to_csv(const Report& r) {
  std::string out;
  for (const auto& [k, v] : r.metadata) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    if (r.tables.size() > 1) out += (i ? "\n" : "") + std::string("# table: ") + r.tables[i].name + "\n";
    out += to_csv(r.tables[i]);
  }
  return out;
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  nlohmann::json md = nlohmann::json::object();
  for (const auto& [k, v] : r.metadata) md[k] = v;
  j["metadata"] = std::move(md);
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& t : r.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json o = nlohmann::json::object();
      for (std::size_t k = 0; k < row.size(); ++k) {
        std::visit([&](const auto& v) { o[t.columns[k]] = v; }, row[k]);
      }
      rows.push_back(std::move(o));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  j["tables"] = std::move(tables);
  return j;
}

enum class OutputFormat { csv, json };

inline std::string render(const Report& r, OutputFormat f) {
  return f == OutputFormat::csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

}  // namespace nongauss
