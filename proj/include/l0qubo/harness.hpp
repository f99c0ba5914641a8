#pragma once

// Trial orchestration: instance generation, the QUBO method and baselines,
// support scoring, loss monitors and aggregation into success curves.

#include "l0qubo/baselines.hpp"
#include "l0qubo/qubo.hpp"
#include "l0qubo/scenarios.hpp"
#include "l0qubo/solvers.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

namespace l0qubo {

enum class Scenario : std::uint8_t { Single, MultiShot };
enum class SolverKind : std::uint8_t { Exhaustive, Annealing };
enum class OperatorKind : std::uint8_t { Arcsin, Uniform, Gaussian };
enum class ValueMode : std::uint8_t { Uniform, Grid };

struct ExperimentConfig {
  Scenario scenario = Scenario::Single;

  std::size_t grid_size = 32;     // M
  std::size_t sensors = 8;        // N
  OperatorKind op = OperatorKind::Arcsin;
  double spacing = 0.5;
  double noise_std = 0.0;
  ValueMode values = ValueMode::Uniform;
  std::size_t shots = 16;
  double fluctuation = 0.1;
  std::size_t basis_columns = 2;

  std::size_t bits = 4;
  bool signed_weights = false;
  BuildParams build;
  BaselineConfig baseline;

  SolverKind solver = SolverKind::Annealing;
  AnnealSchedule schedule;        // seed is replaced per trial
  std::size_t max_exhaustive_bits = 24;

  std::size_t k_min = 1;
  std::size_t k_max = 8;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double threshold = 0.02;
  std::size_t threads = 0;        // 0: hardware concurrency
  bool timing = false;            // wall times make output non-reproducible

  Quantizer quantizer() const {
    return signed_weights ? Quantizer::signed_binary(bits) : Quantizer::unsigned_binary(bits);
  }

  void validate() const {
    if (grid_size < 1 || sensors < 1) throw InputError("grid_size and sensors must be positive");
    if (!(std::isfinite(spacing) && spacing > 0.0)) throw InputError("spacing must be positive");
    if (!(std::isfinite(noise_std) && noise_std >= 0.0)) throw InputError("noise_std must be non-negative");
    if (!(std::isfinite(fluctuation) && fluctuation >= 0.0)) throw InputError("fluctuation must be non-negative");
    if (bits < 1 || bits > Quantizer::kMaxBits) throw InputError("bits out of range");
    if (k_min > k_max) throw InputError("k_min must not exceed k_max");
    if (k_max > grid_size) throw InputError("k_max exceeds grid_size");
    if (trials < 1) throw InputError("trials must be at least 1");
    if (!(std::isfinite(threshold) && threshold >= 0.0)) throw InputError("threshold must be non-negative");
    if (scenario == Scenario::MultiShot) {
      if (shots < 1) throw InputError("shots must be at least 1");
      if (basis_columns < 1 || basis_columns > shots || basis_columns > sensors)
        throw InputError("basis_columns must be between 1 and min(shots, sensors)");
    }
    build.validate();
    baseline.validate();
    schedule.validate();
  }
};

/// Stable per-trial seed; independent of which methods run.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t k, std::size_t trial) {
  return combine_seed(combine_seed(master, k), trial);
}

// ---------------------------------------------------------------------------
// Records.

struct MethodOutcome {
  std::string method;
  RealVector reconstruction;     // single: M values; multi-shot: [Re; Im] of column 0
  int success = 0;
  bool failed = false;
  std::string error;
  double wall_ms = 0.0;
  double loss = std::numeric_limits<double>::quiet_NaN();
};

struct LossMonitors {
  double L_z = std::numeric_limits<double>::quiet_NaN();
  double L_q = std::numeric_limits<double>::quiet_NaN();
  double L_s = std::numeric_limits<double>::quiet_NaN();
  double Lp_s = std::numeric_limits<double>::quiet_NaN();
};

struct DeltaDiagnostic {
  double delta_direct = 0.0;
  double fidelity_term = 0.0;
  double l0_term = 0.0;
  double noise_term = 0.0;
  double decomposed() const { return fidelity_term + l0_term + noise_term; }
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t trial = 0;
  std::vector<std::size_t> truth_support;
  std::vector<MethodOutcome> methods;
  LossMonitors losses;
  std::size_t constraint_violations = 0;
  std::optional<DeltaDiagnostic> delta;
  bool shots_share_support = true;
  bool quantization_bound_holds = true;

  const MethodOutcome* method(const std::string& name) const {
    for (const auto& m : methods)
      if (m.method == name) return &m;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Scoring and diagnostics.

template <class Derived>
int success_score(const SparseSignal& truth, const Eigen::MatrixBase<Derived>& recon, double threshold) {
  if (static_cast<std::size_t>(recon.size()) != truth.size()) throw InputError("reconstruction length mismatch");
  return support(recon, threshold) == truth.support() ? 1 : 0;
}

/// Support of a complex vector: entries whose real or imaginary part
/// exceeds the threshold.
inline std::vector<std::size_t> complex_support(const ComplexVector& v, double threshold) {
  if (!(threshold >= 0.0)) throw InputError("support threshold must be non-negative");
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i).real()) > threshold || std::abs(v(i).imag()) > threshold) out.push_back(static_cast<std::size_t>(i));
  return out;
}

/// delta = L0(s) - L0(z) for x = A z + n, directly and as
/// (1/2g)||Ae||^2 + (||s||_0 - ||z||_0) - (1/g) Re<Ae, n> with e = s - z.
inline DeltaDiagnostic delta_diagnostic(const ComplexMatrix& A, const RealVector& z, const RealVector& s,
                                        const ComplexVector& n, double gamma0) {
  if (z.size() != A.cols() || s.size() != A.cols() || n.size() != A.rows())
    throw InputError("delta diagnostic shapes are inconsistent");
  const ComplexVector x = A * z.cast<Complex>() + n;
  DeltaDiagnostic d;
  d.delta_direct = evaluate_l0_objective(A, x, s, gamma0) - evaluate_l0_objective(A, x, z, gamma0);
  const ComplexVector Ae = A * (s - z).cast<Complex>();
  d.fidelity_term = Ae.squaredNorm() / (2.0 * gamma0);
  d.l0_term = static_cast<double>(count_nonzero(s)) - static_cast<double>(count_nonzero(z));
  d.noise_term = -Ae.dot(n).real() / gamma0;  // dot conjugates the first argument
  return d;
}

// ---------------------------------------------------------------------------
// Instances.

inline ComplexMatrix make_operator(const ExperimentConfig& cfg, Rng& rng) {
  switch (cfg.op) {
    case OperatorKind::Arcsin: return steering_matrix_arcsin(cfg.sensors, cfg.grid_size);
    case OperatorKind::Uniform:
      return steering_matrix_uniform({cfg.sensors, cfg.grid_size, cfg.spacing, GridKind::UniformAngle});
    case OperatorKind::Gaussian: return gaussian_operator(cfg.sensors, cfg.grid_size, rng);
  }
  throw InputError("unknown operator kind");
}

inline SparseSignal make_signal(const ExperimentConfig& cfg, std::size_t k, Rng& rng) {
  return cfg.values == ValueMode::Grid ? gen_grid_signal(cfg.grid_size, k, cfg.quantizer(), rng)
                                       : gen_sparse_signal(cfg.grid_size, k, rng);
}

inline SparseInstance make_single_instance(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix A = make_operator(cfg, rng);
  SparseSignal z = make_signal(cfg, k, rng);
  return gen_single_instance(A, z, cfg.noise_std, rng);
}

inline MultiShotInstance make_multishot_instance(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix A = make_operator(cfg, rng);
  SparseSignal zeta = make_signal(cfg, k, rng);
  return gen_multishot(A, zeta, cfg.shots, cfg.fluctuation, cfg.noise_std, rng);
}

// ---------------------------------------------------------------------------
// QUBO method.

struct QuboSolve {
  QuboBuild build;
  SolveResult result;
  RealMatrix decoded;                 // rows x registry columns
  std::vector<Violation> violations;
};

inline SolveResult run_solver(const ExperimentConfig& cfg, const QuboModel& m, std::uint64_t seed) {
  if (cfg.solver == SolverKind::Exhaustive) return solve_exhaustive(m, cfg.max_exhaustive_bits);
  AnnealSchedule sched = cfg.schedule;
  sched.seed = seed;
  return solve_sa(m, sched);
}

inline QuboSolve finish_solve(const ExperimentConfig& cfg, QuboBuild build, std::uint64_t seed) {
  QuboSolve out{std::move(build), {}, {}, {}};
  out.result = run_solver(cfg, out.build.model, seed);
  out.decoded = decode_solution(out.build.registry, out.result.best);
  out.violations = constraint_violations(out.build.registry, out.result.best);
  return out;
}

inline QuboSolve solve_single_qubo(const ExperimentConfig& cfg, const SparseInstance& inst, std::uint64_t seed) {
  const RealSystem sys = realify_for_real_signal(inst.A, inst.x);
  return finish_solve(cfg, build_l0_qubo(sys.A, sys.x, cfg.quantizer(), cfg.build), seed);
}

/// Real columns [Re u_l; Im u_l] of an observation basis.
inline RealMatrix stack_columns(const ComplexMatrix& U) {
  RealMatrix X(2 * U.rows(), U.cols());
  for (Eigen::Index l = 0; l < U.cols(); ++l) X.col(l) = stack_complex(U.col(l));
  return X;
}

inline QuboSolve solve_group_qubo(const ExperimentConfig& cfg, const ComplexMatrix& A, const ComplexMatrix& basis,
                                  std::uint64_t seed) {
  return finish_solve(cfg,
                      build_group_l0_qubo(realify_for_complex_signal(A), stack_columns(basis), cfg.quantizer(),
                                          cfg.build, SignalLayout::ComplexPairs),
                      seed);
}

namespace detail {

template <class F>
void run_method(TrialRecord& rec, const std::string& name, bool timing, F&& body) {
  MethodOutcome out;
  out.method = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.failed = true;
    out.success = 0;
    out.error = e.what();
  }
  if (timing) out.wall_ms = elapsed_ms(t0);
  rec.methods.push_back(std::move(out));
}

inline std::uint64_t solver_seed(std::uint64_t trial_seed) { return combine_seed(trial_seed, 0x5A17ULL); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Trials.

inline TrialRecord run_single_trial(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed) {
  const SparseInstance inst = make_single_instance(cfg, k, seed);
  const RealSystem sys = realify_for_real_signal(inst.A, inst.x);
  const double g0 = cfg.build.gamma0;
  const Quantizer q = cfg.quantizer();
  const RealVector& z = inst.truth.values();

  TrialRecord rec;
  rec.seed = seed;
  rec.k = k;
  rec.truth_support = inst.truth.support();

  RealVector zq(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) zq(i) = q.round(z(i));
  rec.losses.L_z = evaluate_l0_objective(inst.A, inst.x, z, g0);
  rec.losses.L_q = evaluate_l0_objective(inst.A, inst.x, zq, g0);
  {
    // |fid(q) - fid(z)| <= (1/2g)(||Ar||^2 + 2 ||Ar|| ||x - Az||), r = q - z.
    const ComplexVector res_z = inst.x - inst.A * z.cast<Complex>();
    const ComplexVector res_q = inst.x - inst.A * zq.cast<Complex>();
    const double Ar = (inst.A * (zq - z).cast<Complex>()).norm();
    const double gap = std::abs(res_q.squaredNorm() - res_z.squaredNorm()) / (2.0 * g0);
    const double bound = (Ar * Ar + 2.0 * Ar * res_z.norm()) / (2.0 * g0);
    rec.quantization_bound_holds = gap <= bound * (1.0 + 1e-12) + 1e-12;
  }

  detail::run_method(rec, "qubo", cfg.timing, [&](MethodOutcome& out) {
    const QuboSolve qs = solve_single_qubo(cfg, inst, detail::solver_seed(seed));
    const RealVector s = qs.decoded.col(0);
    out.reconstruction = s;
    out.success = success_score(inst.truth, s, cfg.threshold);
    out.loss = evaluate_l0_objective(inst.A, inst.x, s, g0);
    rec.losses.L_s = out.loss;
    rec.losses.Lp_s = qs.result.best_energy;
    rec.constraint_violations = qs.violations.size();
    rec.delta = delta_diagnostic(inst.A, z, s, inst.noise, g0);
  });
  detail::run_method(rec, "omp", cfg.timing, [&](MethodOutcome& out) {
    out.reconstruction = omp(sys.A, sys.x, cfg.baseline).coefficients;
    out.success = success_score(inst.truth, out.reconstruction, cfg.threshold);
    out.loss = evaluate_l0_objective(inst.A, inst.x, out.reconstruction, g0);
  });
  detail::run_method(rec, "lasso", cfg.timing, [&](MethodOutcome& out) {
    out.reconstruction = lasso_cd(sys.A, sys.x, cfg.baseline.gamma1, cfg.baseline).coefficients;
    out.success = success_score(inst.truth, out.reconstruction, cfg.threshold);
    out.loss = evaluate_l0_objective(inst.A, inst.x, out.reconstruction, g0);
  });
  return rec;
}

/// Least-squares representation of the basis on the true support; the
/// "original" point for the multi-shot loss monitors.
inline ComplexMatrix reference_coefficients(const ComplexMatrix& A, const ComplexMatrix& basis,
                                            const std::vector<std::size_t>& supp) {
  ComplexMatrix Z = ComplexMatrix::Zero(A.cols(), basis.cols());
  if (supp.empty()) return Z;
  ComplexMatrix sub(A.rows(), static_cast<Eigen::Index>(supp.size()));
  for (std::size_t t = 0; t < supp.size(); ++t) sub.col(static_cast<Eigen::Index>(t)) = A.col(static_cast<Eigen::Index>(supp[t]));
  const ComplexMatrix coef = Eigen::CompleteOrthogonalDecomposition<ComplexMatrix>(sub).solve(basis);
  for (std::size_t t = 0; t < supp.size(); ++t) Z.row(static_cast<Eigen::Index>(supp[t])) = coef.row(static_cast<Eigen::Index>(t));
  return Z;
}

inline TrialRecord run_multishot_trial(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed) {
  const MultiShotInstance inst = make_multishot_instance(cfg, k, seed);
  const double g0 = cfg.build.gamma0;
  const Quantizer q = cfg.quantizer();

  TrialRecord rec;
  rec.seed = seed;
  rec.k = k;
  rec.truth_support = inst.truth.support();
  rec.shots_share_support = inst.shots_share_support();

  const SvdBasis basis = observation_basis(inst.shots, cfg.basis_columns);
  const ComplexMatrix Zref = reference_coefficients(inst.A, basis.columns, rec.truth_support);
  ComplexMatrix Zq(Zref.rows(), Zref.cols());
  for (Eigen::Index j = 0; j < Zref.cols(); ++j)
    for (Eigen::Index i = 0; i < Zref.rows(); ++i) Zq(i, j) = Complex(q.round(Zref(i, j).real()), q.round(Zref(i, j).imag()));
  rec.losses.L_z = evaluate_group_l0_objective(inst.A, basis.columns, Zref, g0);
  rec.losses.L_q = evaluate_group_l0_objective(inst.A, basis.columns, Zq, g0);

  auto score_column = [&](const ComplexVector& s0) {
    return complex_support(s0, cfg.threshold) == rec.truth_support ? 1 : 0;
  };

  detail::run_method(rec, "l0_svd", cfg.timing, [&](MethodOutcome& out) {
    const QuboSolve qs = solve_group_qubo(cfg, inst.A, basis.columns, detail::solver_seed(seed));
    const ComplexMatrix Z = to_complex_signal(qs.build.registry, qs.decoded);
    out.reconstruction = stack_complex(Z.col(0));
    out.success = score_column(Z.col(0));
    out.loss = evaluate_group_l0_objective(inst.A, basis.columns, Z, g0);
    rec.losses.L_s = out.loss;
    rec.losses.Lp_s = qs.result.best_energy;
    rec.constraint_violations = qs.violations.size();
  });
  detail::run_method(rec, "l1_svd", cfg.timing, [&](MethodOutcome& out) {
    // Reuse the shared basis rather than recomputing it.
    const RealMatrix A_lift = realify_for_complex_signal(inst.A);
    const GroupLassoResult g =
        group_lasso_pg(A_lift, stack_columns(basis.columns), cfg.baseline.gamma1, cfg.baseline, SignalLayout::ComplexPairs);
    const Eigen::Index M = inst.A.cols();
    ComplexVector s0(M);
    for (Eigen::Index i = 0; i < M; ++i) s0(i) = Complex(g.coefficients(i, 0), g.coefficients(M + i, 0));
    out.reconstruction = stack_complex(s0);
    out.success = score_column(s0);
  });
  detail::run_method(rec, "lasso_avg", cfg.timing, [&](MethodOutcome& out) {
    const RealSystem sys = realify_for_real_signal(inst.A, average_observation(inst));
    out.reconstruction = lasso_cd(sys.A, sys.x, cfg.baseline.gamma1, cfg.baseline).coefficients;
    out.success = success_score(inst.truth, out.reconstruction, cfg.threshold);
  });
  return rec;
}

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t k, std::size_t trial) {
  const std::uint64_t seed = trial_seed(cfg.seed, k, trial);
  TrialRecord rec = cfg.scenario == Scenario::Single ? run_single_trial(cfg, k, seed) : run_multishot_trial(cfg, k, seed);
  rec.trial = trial;
  return rec;
}

// ---------------------------------------------------------------------------
// Aggregation.

struct MethodPoint {
  std::string method;
  double success_rate = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double L_z_mean = std::numeric_limits<double>::quiet_NaN();
  double L_q_mean = std::numeric_limits<double>::quiet_NaN();
  double L_s_mean = std::numeric_limits<double>::quiet_NaN();
  double Lp_s_mean = std::numeric_limits<double>::quiet_NaN();
  double mean_wall_ms = std::numeric_limits<double>::quiet_NaN();
};

struct CurvePoint {
  std::size_t k = 0;
  std::vector<MethodPoint> methods;

  const MethodPoint& method(const std::string& name) const {
    for (const auto& m : methods)
      if (m.method == name) return m;
    throw InputError("no method '" + name + "' in curve point");
  }
};

struct SuccessCurve {
  std::vector<CurvePoint> points;
};

struct ExperimentResult {
  SuccessCurve curve;
  std::vector<TrialRecord> records;
};

namespace detail {

/// Mean over finite values; NaN when there are none.
struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  }
  double value() const { return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN(); }
};

}  // namespace detail

/// Aggregates records of one sweep value, folding in record order.
inline CurvePoint aggregate(std::size_t k, const std::vector<const TrialRecord*>& recs, bool timing) {
  CurvePoint pt;
  pt.k = k;
  if (recs.empty()) return pt;
  for (const MethodOutcome& proto : recs.front()->methods) {
    MethodPoint mp;
    mp.method = proto.method;
    std::size_t successes = 0;
    detail::Mean lz, lq, ls, lp, wall;
    const bool is_qubo = proto.method == "qubo" || proto.method == "l0_svd";
    for (const TrialRecord* r : recs) {
      const MethodOutcome* m = r->method(proto.method);
      ++mp.trials;
      if (!m || m->failed) {
        ++mp.failures;
        continue;
      }
      successes += static_cast<std::size_t>(m->success);
      lz.add(r->losses.L_z);
      lq.add(r->losses.L_q);
      ls.add(m->loss);
      if (is_qubo) lp.add(r->losses.Lp_s);
      if (timing) wall.add(m->wall_ms);
    }
    mp.success_rate = static_cast<double>(successes) / static_cast<double>(mp.trials);
    mp.L_z_mean = lz.value();
    mp.L_q_mean = lq.value();
    mp.L_s_mean = ls.value();
    mp.Lp_s_mean = lp.value();
    mp.mean_wall_ms = wall.value();
    pt.methods.push_back(std::move(mp));
  }
  return pt;
}

/// Runs cfg.trials trials for every k in [k_min, k_max]. Trials may run on
/// several threads; records are stored by index, so the result is identical
/// to a serial run.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  cfg.validate();
  struct Job {
    std::size_t k, trial;
  };
  std::vector<Job> jobs;
  for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k)
    for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({k, t});

  ExperimentResult out;
  out.records.resize(jobs.size());
  std::atomic<std::size_t> next{0}, done{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      out.records[j] = run_trial(cfg, jobs[j].k, jobs[j].trial);
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) progress(d, jobs.size());
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t k = cfg.k_min, j = 0; k <= cfg.k_max; ++k) {
    std::vector<const TrialRecord*> recs;
    for (std::size_t t = 0; t < cfg.trials; ++t, ++j) recs.push_back(&out.records[j]);
    out.curve.points.push_back(aggregate(k, recs, cfg.timing));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report output.

inline std::string format_csv_real(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "sweep_k,method,success_rate,trials,failures,L_z_mean,L_q_mean,L_s_mean,Lp_s_mean,mean_wall_ms";

inline std::string curve_to_csv(const SuccessCurve& curve) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const CurvePoint& p : curve.points)
    for (const MethodPoint& m : p.methods)
      os << p.k << ',' << m.method << ',' << format_csv_real(m.success_rate) << ',' << m.trials << ',' << m.failures << ','
         << format_csv_real(m.L_z_mean) << ',' << format_csv_real(m.L_q_mean) << ',' << format_csv_real(m.L_s_mean) << ','
         << format_csv_real(m.Lp_s_mean) << ',' << format_csv_real(m.mean_wall_ms) << '\n';
  return os.str();
}

inline nlohmann::json json_real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json record_to_json(const TrialRecord& r, bool timing) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["k"] = r.k;
  j["trial"] = r.trial;
  j["truth_support"] = r.truth_support;
  j["losses"] = {{"L_z", json_real(r.losses.L_z)},
                 {"L_q", json_real(r.losses.L_q)},
                 {"L_s", json_real(r.losses.L_s)},
                 {"Lp_s", json_real(r.losses.Lp_s)}};
  j["constraint_violations"] = r.constraint_violations;
  j["shots_share_support"] = r.shots_share_support;
  if (r.delta)
    j["delta"] = {{"direct", r.delta->delta_direct},
                  {"fidelity_term", r.delta->fidelity_term},
                  {"l0_term", r.delta->l0_term},
                  {"noise_term", r.delta->noise_term}};
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodOutcome& m : r.methods) {
    nlohmann::json mj = {{"method", m.method},
                         {"success", m.success},
                         {"failed", m.failed},
                         {"loss", json_real(m.loss)},
                         {"reconstruction", std::vector<double>(m.reconstruction.data(),
                                                                m.reconstruction.data() + m.reconstruction.size())}};
    if (m.failed) mj["error"] = m.error;
    if (timing) mj["wall_ms"] = m.wall_ms;
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);
  return j;
}

inline std::string records_to_jsonl(const std::vector<TrialRecord>& records, bool timing) {
  std::string out;
  for (const TrialRecord& r : records) {
    out += record_to_json(r, timing).dump();
    out += '\n';
  }
  return out;
}

}  // namespace l0qubo
