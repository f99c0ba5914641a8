#pragma once

// Plain-text QUBO exchange format and the JSON registry sidecar.
//
//   # comment lines (registry metadata)
//   p qubo <num_vars> <num_entries>
//   <i> <j> <coeff>          one per stored entry, 0-based, i <= j
//   c offset <value>
//
// Reals are written with 17 significant digits so a read-back is bit-exact.

#include "l0qubo/qubo.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace l0qubo {

struct FormatError : std::runtime_error {
  FormatError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, always with a decimal point and exponent.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline double parse_real(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v))
    throw FormatError(line, "bad real number '" + tok + "'");
  return v;
}

inline std::size_t parse_index(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw FormatError(line, "bad index '" + tok + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(tok.c_str(), nullptr, 10);
  if (errno == ERANGE) throw FormatError(line, "index out of range '" + tok + "'");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------
// Registry sidecar.

inline nlohmann::json registry_to_json(const VariableRegistry& reg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = reg.kind() == RegistryKind::Single ? "single" : "group";
  j["layout"] = reg.layout() == SignalLayout::Real ? "real" : "complex_pairs";
  j["rows"] = reg.rows();
  j["observation_columns"] = reg.observation_columns();
  j["columns"] = reg.columns();
  j["bits"] = reg.bits();
  j["weights"] = std::vector<double>(reg.quantizer().weights().begin(), reg.quantizer().weights().end());
  j["num_variables"] = reg.num_variables();
  j["num_signal_bits"] = reg.num_signal_bits();
  return j;
}

inline VariableRegistry registry_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) throw InputError("unsupported registry schema_version");
    Quantizer q(j.at("weights").get<std::vector<double>>());
    const auto kind = j.at("kind").get<std::string>();
    const auto layout_name = j.value("layout", std::string("real"));
    SignalLayout layout;
    if (layout_name == "real")
      layout = SignalLayout::Real;
    else if (layout_name == "complex_pairs")
      layout = SignalLayout::ComplexPairs;
    else
      throw InputError("unknown registry layout '" + layout_name + "'");
    const auto rows = j.at("rows").get<std::size_t>();
    VariableRegistry reg = kind == "single" ? VariableRegistry::single(rows, q)
                           : kind == "group"
                               ? VariableRegistry::group(rows, j.at("observation_columns").get<std::size_t>(), q, layout)
                               : throw InputError("unknown registry kind '" + kind + "'");
    if (j.contains("num_variables") && j["num_variables"].get<std::size_t>() != reg.num_variables())
      throw InputError("registry num_variables does not match its shape");
    return reg;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed registry document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// QUBO text file.

inline void write_qubo(std::ostream& os, const QuboModel& m, const VariableRegistry* reg = nullptr) {
  os << "# l0qubo model\n";
  if (reg) os << "# registry " << registry_to_json(*reg).dump() << '\n';
  os << "p qubo " << m.num_vars() << ' ' << m.num_entries() << '\n';
  for (const auto& [key, v] : m.entries()) os << key.first << ' ' << key.second << ' ' << format_real(v) << '\n';
  os << "c offset " << format_real(m.offset()) << '\n';
}

inline QuboModel read_qubo(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<QuboModel> model;
  std::size_t expected = 0, seen = 0;
  bool have_offset = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "p") {
      if (model) throw FormatError(lineno, "duplicate header");
      if (tok.size() != 4 || tok[1] != "qubo") throw FormatError(lineno, "expected 'p qubo <num_vars> <num_entries>'");
      model.emplace(parse_index(tok[2], lineno));
      expected = parse_index(tok[3], lineno);
    } else if (tok[0] == "c") {
      if (!model) throw FormatError(lineno, "offset before header");
      if (tok.size() != 3 || tok[1] != "offset") throw FormatError(lineno, "expected 'c offset <value>'");
      if (have_offset) throw FormatError(lineno, "duplicate offset line");
      model->set_offset(parse_real(tok[2], lineno));
      have_offset = true;
    } else {
      if (!model) throw FormatError(lineno, "entry before header");
      if (have_offset) throw FormatError(lineno, "entry after offset line");
      if (tok.size() != 3) throw FormatError(lineno, "expected '<i> <j> <coeff>'");
      const std::size_t i = parse_index(tok[0], lineno), j = parse_index(tok[1], lineno);
      if (i > j) throw FormatError(lineno, "entry must satisfy i <= j");
      if (j >= model->num_vars()) throw FormatError(lineno, "variable index out of range");
      const double v = parse_real(tok[2], lineno);
      if (v == 0.0) throw FormatError(lineno, "zero coefficients are not stored");
      if (model->coefficient(i, j) != 0.0) throw FormatError(lineno, "duplicate entry");
      model->set(i, j, v);
      ++seen;
    }
  }
  if (!model) throw FormatError(lineno, "missing 'p qubo' header");
  if (!have_offset) throw FormatError(lineno, "missing 'c offset' line");
  if (seen != expected)
    throw FormatError(lineno, "header announces " + std::to_string(expected) + " entries, found " + std::to_string(seen));
  return *model;
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << content;
    os.flush();
    if (!os) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void export_qubo_file(const QuboModel& m, const VariableRegistry* reg, const std::filesystem::path& path) {
  std::ostringstream os;
  write_qubo(os, m, reg);
  write_file_atomic(path, os.str());
}

inline QuboModel import_qubo_file(const std::filesystem::path& path) {
  std::istringstream is(read_file(path));
  return read_qubo(is);
}

}  // namespace l0qubo
