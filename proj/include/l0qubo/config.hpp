#pragma once

// Run configuration as a versioned JSON document.
//
// {
//   "schema_version": 1,
//   "scenario": "single" | "multishot",
//   "problem":    {...}, "quantizer": {...}, "qubo":   {...},
//   "baseline":   {...}, "solver":    {...}, "experiment": {...},
//   "output":     {...}
// }
//
// Every section is optional. Unknown keys are rejected and each error names
// the offending field by its dotted path.

#include "l0qubo/harness.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <string>

namespace l0qubo {

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigError : InputError {
  using InputError::InputError;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::string csv_path = "results.csv";
  std::string jsonl_path;  // empty: no per-trial records
};

/// Defaults that depend on the scenario.
inline RunConfig default_config(Scenario s) {
  RunConfig rc;
  rc.experiment.scenario = s;
  if (s == Scenario::MultiShot) {
    rc.experiment.build.gamma0 = 0.0005;
    rc.experiment.baseline.gamma1 = 0.00006;
  }
  return rc;
}

namespace detail {

inline const char* scenario_name(Scenario s) { return s == Scenario::Single ? "single" : "multishot"; }
inline const char* solver_name(SolverKind s) { return s == SolverKind::Exhaustive ? "exhaustive" : "sa"; }
inline const char* operator_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Arcsin: return "arcsin";
    case OperatorKind::Uniform: return "uniform";
    case OperatorKind::Gaussian: return "gaussian";
  }
  return "?";
}
inline const char* values_name(ValueMode v) { return v == ValueMode::Grid ? "grid" : "uniform"; }

/// Typed field access over one JSON object with unknown-key detection.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void get(const char* key, double& out) {
    if (const auto* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "expected a finite number");
    }
  }
  void get(const char* key, std::size_t& out) {
    if (const auto* v = take(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void get(const char* key, std::uint64_t& out, int) {
    if (const auto* v = take(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& out) {
    if (const auto* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const auto* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <class E>
  void get_enum(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    std::string s;
    get(key, s);
    if (s.empty() && !j_.contains(key)) return;
    std::string allowed;
    for (const auto& [n, e] : names) {
      if (s == n) {
        out = e;
        return;
      }
      allowed += allowed.empty() ? n : std::string(", ") + n;
    }
    fail(key, "unknown value '" + s + "' (allowed: " + allowed + ")");
  }

  std::optional<Section> child(const char* key) {
    if (const auto* v = take(key)) return Section(*v, field(key));
    return std::nullopt;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k.c_str()) + ": unknown key");
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const char* key, const std::string& msg) const { throw ConfigError(field(key) + ": " + msg); }

 private:
  const nlohmann::json* take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("schema_version")) throw ConfigError("schema_version: required key is missing");
  if (!j.contains("scenario")) throw ConfigError("scenario: required key is missing");
  detail::Section root(j, "");
  std::size_t version = 0;
  root.get("schema_version", version);
  if (version != kConfigSchemaVersion)
    root.fail("schema_version", "unsupported version " + std::to_string(version));
  Scenario scenario = Scenario::Single;
  root.get_enum("scenario", scenario, {{"single", Scenario::Single}, {"multishot", Scenario::MultiShot}});

  RunConfig rc = default_config(scenario);
  ExperimentConfig& e = rc.experiment;

  if (auto s = root.child("problem")) {
    s->get("grid_size", e.grid_size);
    s->get("sensors", e.sensors);
    s->get_enum("operator", e.op,
                {{"arcsin", OperatorKind::Arcsin}, {"uniform", OperatorKind::Uniform}, {"gaussian", OperatorKind::Gaussian}});
    s->get("spacing", e.spacing);
    s->get("noise_std", e.noise_std);
    s->get_enum("values", e.values, {{"uniform", ValueMode::Uniform}, {"grid", ValueMode::Grid}});
    s->get("shots", e.shots);
    s->get("fluctuation", e.fluctuation);
    s->get("basis_columns", e.basis_columns);
    s->finish();
  }
  if (auto s = root.child("quantizer")) {
    s->get("bits", e.bits);
    s->get("signed", e.signed_weights);
    s->finish();
  }
  if (auto s = root.child("qubo")) {
    s->get("gamma0", e.build.gamma0);
    s->get("lambda_c", e.build.lambda_c);
    s->get("lambda_d", e.build.lambda_d);
    s->finish();
  }
  if (auto s = root.child("baseline")) {
    s->get("gamma1", e.baseline.gamma1);
    s->get("max_iterations", e.baseline.max_iterations);
    s->get("tolerance", e.baseline.tolerance);
    s->get("omp_max_nonzeros", e.baseline.omp_max_nonzeros);
    s->get("omp_residual_tolerance", e.baseline.omp_residual_tolerance);
    s->finish();
  }
  if (auto s = root.child("solver")) {
    s->get_enum("kind", e.solver, {{"sa", SolverKind::Annealing}, {"exhaustive", SolverKind::Exhaustive}});
    s->get("beta0", e.schedule.beta0);
    s->get("beta1", e.schedule.beta1);
    s->get("sweeps", e.schedule.sweeps);
    s->get("reads", e.schedule.reads);
    s->get("max_exhaustive_bits", e.max_exhaustive_bits);
    s->finish();
  }
  if (auto s = root.child("experiment")) {
    s->get("k_min", e.k_min);
    s->get("k_max", e.k_max);
    s->get("trials", e.trials);
    s->get("seed", e.seed, 0);
    s->get("threshold", e.threshold);
    s->get("threads", e.threads);
    s->get("timing", e.timing);
    s->finish();
  }
  if (auto s = root.child("output")) {
    s->get("csv", rc.csv_path);
    s->get("jsonl", rc.jsonl_path);
    s->finish();
  }
  root.finish();

  try {
    e.validate();
  } catch (const InputError& err) {
    throw ConfigError(std::string("invalid configuration: ") + err.what());
  }
  return rc;
}

inline nlohmann::json config_to_json(const RunConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  nlohmann::ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["scenario"] = detail::scenario_name(e.scenario);
  j["problem"] = {{"grid_size", e.grid_size},
                  {"sensors", e.sensors},
                  {"operator", detail::operator_name(e.op)},
                  {"spacing", e.spacing},
                  {"noise_std", e.noise_std},
                  {"values", detail::values_name(e.values)},
                  {"shots", e.shots},
                  {"fluctuation", e.fluctuation},
                  {"basis_columns", e.basis_columns}};
  j["quantizer"] = {{"bits", e.bits}, {"signed", e.signed_weights}};
  j["qubo"] = {{"gamma0", e.build.gamma0}, {"lambda_c", e.build.lambda_c}, {"lambda_d", e.build.lambda_d}};
  j["baseline"] = {{"gamma1", e.baseline.gamma1},
                   {"max_iterations", e.baseline.max_iterations},
                   {"tolerance", e.baseline.tolerance},
                   {"omp_max_nonzeros", e.baseline.omp_max_nonzeros},
                   {"omp_residual_tolerance", e.baseline.omp_residual_tolerance}};
  j["solver"] = {{"kind", detail::solver_name(e.solver)},
                 {"beta0", e.schedule.beta0},
                 {"beta1", e.schedule.beta1},
                 {"sweeps", e.schedule.sweeps},
                 {"reads", e.schedule.reads},
                 {"max_exhaustive_bits", e.max_exhaustive_bits}};
  j["experiment"] = {{"k_min", e.k_min},         {"k_max", e.k_max},         {"trials", e.trials},
                     {"seed", e.seed},           {"threshold", e.threshold}, {"threads", e.threads},
                     {"timing", e.timing}};
  j["output"] = {{"csv", rc.csv_path}, {"jsonl", rc.jsonl_path}};
  return nlohmann::json::parse(j.dump());
}

/// Pretty text with the sections in declaration order.
inline std::string config_to_string(const RunConfig& rc) {
  const nlohmann::json j = config_to_json(rc);
  nlohmann::ordered_json o;
  for (const char* key : {"schema_version", "scenario", "problem", "quantizer", "qubo", "baseline", "solver", "experiment",
                          "output"})
    o[key] = j.at(key);
  return o.dump(2) + "\n";
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  return config_from_json(j);
}

inline bool operator==(const RunConfig& a, const RunConfig& b) { return config_to_json(a) == config_to_json(b); }

}  // namespace l0qubo
