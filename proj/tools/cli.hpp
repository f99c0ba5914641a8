#pragma once

// Command-line frontend. run_cli is separate from main so tests can drive it
// with captured streams.

#include "l0qubo/l0qubo.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace l0qubo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitIo = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string solver;
  bool print_config = false;
};

inline RunConfig load_run_config(const Overrides& o, std::optional<Scenario> scenario = std::nullopt) {
  RunConfig rc = o.config_path.empty() ? default_config(scenario.value_or(Scenario::Single))
                                       : parse_config(read_file(o.config_path));
  if (!o.config_path.empty() && scenario && rc.experiment.scenario != *scenario)
    throw ConfigError("scenario: config says '" + std::string(detail::scenario_name(rc.experiment.scenario)) +
                      "' but the instance is '" + detail::scenario_name(*scenario) + "'");
  if (o.seed) rc.experiment.seed = *o.seed;
  if (o.solver == "exhaustive")
    rc.experiment.solver = SolverKind::Exhaustive;
  else if (o.solver == "sa")
    rc.experiment.solver = SolverKind::Annealing;
  else if (!o.solver.empty())
    throw ConfigError("--solver: expected 'exhaustive' or 'sa'");
  try {
    rc.experiment.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return rc;
}

inline nlohmann::json signal_json(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json signal_json(const ComplexMatrix& Z) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index l = 0; l < Z.cols(); ++l) row.push_back({Z(i, l).real(), Z(i, l).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json load_instance_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("instance is not valid JSON: ") + e.what());
  }
}

inline Scenario instance_scenario(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw InputError("instance: missing 'kind'");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "single") return Scenario::Single;
  if (kind == "multishot") return Scenario::MultiShot;
  throw InputError("instance: unknown kind '" + kind + "'");
}

inline nlohmann::json solve_report(const RunConfig& rc, const nlohmann::json& doc) {
  const ExperimentConfig& cfg = rc.experiment;
  const std::uint64_t seed = cfg.seed;
  nlohmann::json out;
  const Quantizer q = cfg.quantizer();
  if (instance_scenario(doc) == Scenario::Single) {
    const SparseInstance inst = single_instance_from_json(doc);
    const QuboSolve qs = solve_single_qubo(cfg, inst, seed);
    const RealVector s = qs.decoded.col(0);
    const RealVector& z = inst.truth.values();
    RealVector zq(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) zq(i) = q.round(z(i));
    const double g0 = cfg.build.gamma0;
    out["kind"] = "single";
    out["signal"] = signal_json(s);
    out["losses"] = {{"L_z", evaluate_l0_objective(inst.A, inst.x, z, g0)},
                     {"L_q", evaluate_l0_objective(inst.A, inst.x, zq, g0)},
                     {"L_s", evaluate_l0_objective(inst.A, inst.x, s, g0)},
                     {"Lp_s", qs.result.best_energy}};
    out["support"] = support(s, cfg.threshold);
    out["energy"] = qs.result.best_energy;
    out["offset"] = qs.build.model.offset();
    out["constraint_violations"] = qs.violations.size();
    out["num_variables"] = qs.build.model.num_vars();
    out["bits"] = qs.result.best;
    for (const auto& w : qs.build.warnings) out["warnings"].push_back(w);
  } else {
    const MultiShotInstance inst = multishot_instance_from_json(doc);
    const SvdBasis basis = observation_basis(inst.shots, cfg.basis_columns);
    const QuboSolve qs = solve_group_qubo(cfg, inst.A, basis.columns, seed);
    const ComplexMatrix Z = to_complex_signal(qs.build.registry, qs.decoded);
    const ComplexMatrix Zref = reference_coefficients(inst.A, basis.columns, inst.truth.support());
    const double g0 = cfg.build.gamma0;
    out["kind"] = "multishot";
    out["signal"] = signal_json(Z);
    out["losses"] = {{"L_z", evaluate_group_l0_objective(inst.A, basis.columns, Zref, g0)},
                     {"L_s", evaluate_group_l0_objective(inst.A, basis.columns, Z, g0)},
                     {"Lp_s", qs.result.best_energy}};
    out["support"] = complex_support(Z.col(0), cfg.threshold);
    out["energy"] = qs.result.best_energy;
    out["offset"] = qs.build.model.offset();
    out["constraint_violations"] = qs.violations.size();
    out["num_variables"] = qs.build.model.num_vars();
    out["bits"] = qs.result.best;
    for (const auto& w : qs.build.warnings) out["warnings"].push_back(w);
  }
  return out;
}

/// Builds the QUBO for an instance document.
inline QuboBuild build_for_instance(const RunConfig& rc, const nlohmann::json& doc) {
  const ExperimentConfig& cfg = rc.experiment;
  if (instance_scenario(doc) == Scenario::Single) {
    const SparseInstance inst = single_instance_from_json(doc);
    const RealSystem sys = realify_for_real_signal(inst.A, inst.x);
    return build_l0_qubo(sys.A, sys.x, cfg.quantizer(), cfg.build);
  }
  const MultiShotInstance inst = multishot_instance_from_json(doc);
  const SvdBasis basis = observation_basis(inst.shots, cfg.basis_columns);
  return build_group_l0_qubo(realify_for_complex_signal(inst.A), stack_columns(basis.columns), cfg.quantizer(), cfg.build,
                             SignalLayout::ComplexPairs);
}

inline nlohmann::json generate_instance(const RunConfig& rc, std::size_t k) {
  const ExperimentConfig& cfg = rc.experiment;
  if (k > cfg.grid_size) throw InputError("--k exceeds grid_size");
  const std::uint64_t seed = trial_seed(cfg.seed, k, 0);
  if (cfg.scenario == Scenario::Single) return instance_to_json(make_single_instance(cfg, k, seed));
  return instance_to_json(make_multishot_instance(cfg, k, seed));
}

/// Reads whitespace-separated 0/1 values.
inline Bits parse_assignment(const std::string& text) {
  Bits bits;
  std::istringstream is(text);
  for (std::string tok; is >> tok;) {
    if (tok == "0")
      bits.push_back(0);
    else if (tok == "1")
      bits.push_back(1);
    else
      throw InputError("assignment: expected 0 or 1, got '" + tok + "'");
  }
  return bits;
}

inline std::string registry_sidecar_path(const std::string& qubo_path) { return qubo_path + ".registry.json"; }

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse signal reconstruction by l0-regularized QUBO"};
  app.require_subcommand(1);

  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "Run configuration (JSON)");
    sub->add_option("--seed", ov.seed, "Master seed override");
    sub->add_option("--solver", ov.solver, "Solver override")->check(CLI::IsMember({"exhaustive", "sa"}));
  };

  std::string out_path, jsonl_path, instance_path, registry_path, assignment_path;
  std::size_t k = 1;

  auto* exp = app.add_subcommand("experiment", "Run a success-rate sweep and write the CSV report");
  add_common(exp);
  exp->add_option("--out", out_path, "CSV output path");
  exp->add_option("--jsonl", jsonl_path, "Per-trial JSON lines output path");
  exp->add_flag("--print-config", ov.print_config, "Print the effective configuration and exit");

  auto* solve = app.add_subcommand("solve", "Solve one instance and print a JSON report");
  add_common(solve);
  solve->add_option("--instance", instance_path, "Instance document (JSON)")->required();
  solve->add_option("--out", out_path, "Write the report here instead of standard output");

  auto* exq = app.add_subcommand("export-qubo", "Write the QUBO of an instance plus a registry sidecar");
  add_common(exq);
  exq->add_option("--instance", instance_path, "Instance document (JSON)")->required();
  exq->add_option("--out", out_path, "QUBO output path")->required();

  auto* dec = app.add_subcommand("decode", "Decode an external assignment with a registry sidecar");
  dec->add_option("--registry", registry_path, "Registry sidecar (JSON)")->required();
  dec->add_option("--assignment", assignment_path, "File of whitespace-separated 0/1 values")->required();

  auto* gen = app.add_subcommand("generate", "Generate a seeded instance document");
  add_common(gen);
  gen->add_option("--k", k, "Number of nonzero entries");
  gen->add_option("--out", out_path, "Instance output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    if (*exp) {
      RunConfig rc = load_run_config(ov);
      if (!out_path.empty()) rc.csv_path = out_path;
      if (!jsonl_path.empty()) rc.jsonl_path = jsonl_path;
      if (ov.print_config) {
        out << config_to_string(rc);
        return kExitOk;
      }
      const ExperimentResult res = run_experiment(rc.experiment);
      write_file_atomic(rc.csv_path, curve_to_csv(res.curve));
      if (!rc.jsonl_path.empty()) write_file_atomic(rc.jsonl_path, records_to_jsonl(res.records, rc.experiment.timing));
      out << "wrote " << rc.csv_path << '\n';
    } else if (*solve) {
      const nlohmann::json doc = load_instance_json(instance_path);
      const RunConfig rc = load_run_config(ov, instance_scenario(doc));
      const std::string text = solve_report(rc, doc).dump(2) + "\n";
      if (out_path.empty())
        out << text;
      else
        write_file_atomic(out_path, text);
    } else if (*exq) {
      const nlohmann::json doc = load_instance_json(instance_path);
      const RunConfig rc = load_run_config(ov, instance_scenario(doc));
      const QuboBuild b = build_for_instance(rc, doc);
      export_qubo_file(b.model, &b.registry, out_path);
      write_file_atomic(registry_sidecar_path(out_path), registry_to_json(b.registry).dump(2) + "\n");
      out << "wrote " << out_path << " (" << b.model.num_vars() << " variables)\n";
    } else if (*dec) {
      nlohmann::json rj;
      try {
        rj = nlohmann::json::parse(read_file(registry_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("registry is not valid JSON: ") + e.what());
      }
      const VariableRegistry reg = registry_from_json(rj);
      const Bits bits = parse_assignment(read_file(assignment_path));
      const RealMatrix Z = decode_solution(reg, bits);
      nlohmann::json report;
      if (reg.layout() == SignalLayout::ComplexPairs)
        report["signal"] = signal_json(to_complex_signal(reg, Z));
      else if (Z.cols() == 1)
        report["signal"] = signal_json(RealVector(Z.col(0)));
      else
        for (Eigen::Index l = 0; l < Z.cols(); ++l) report["signal"].push_back(signal_json(RealVector(Z.col(l))));
      report["constraint_violations"] = constraint_violations(reg, bits).size();
      out << report.dump(2) << '\n';
    } else if (*gen) {
      const RunConfig rc = load_run_config(ov);
      write_file_atomic(out_path, generate_instance(rc, k).dump() + "\n");
      out << "wrote " << out_path << '\n';
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolveError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace l0qubo::cli
