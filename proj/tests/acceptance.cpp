// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "l0qubo/l0qubo.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>

using namespace l0qubo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string rates(const SuccessCurve& c, const std::string& method) {
  std::string s;
  for (const auto& p : c.points) s += fmt("%s%.2f", s.empty() ? "" : " ", p.method(method).success_rate);
  return s;
}

Outcome penalty_truth_table() {
  Outcome o;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const int p = penalty_value(a, b, c);
        o.require(p >= 0, fmt("p(%d,%d,%d) < 0", a, b, c));
        o.require((p == 0) == (c == a * b), fmt("p(%d,%d,%d) zero set wrong", a, b, c));
        // The same table through the QUBO expansion.
        QuboModel m(3);
        add_penalty(m, positive(0), positive(1), 2, 1.0);
        o.require(evaluate_qubo(m, Bits{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c)}) == p,
                  fmt("expanded p(%d,%d,%d) differs", a, b, c));
      }
  o.detail = o.pass ? "8/8 assignments" : o.detail;
  return o;
}

Outcome gadget_exactness() {
  Outcome o;
  std::mt19937_64 rng(2001);
  const RealMatrix A = oracle::random_real(2, 3, rng);
  const RealVector x = oracle::random_real(2, 1, rng);
  BuildParams params;
  params.gamma0 = 0.001;
  params.lambda_c = 1.5;
  const QuboBuild b = build_l0_qubo(A, x, Quantizer::unsigned_binary(4), params);
  std::vector<std::size_t> signal, aux;
  for (std::size_t v = 0; v < b.registry.num_variables(); ++v)
    (b.registry.roles()[v].kind == VariableKind::SignalBit ? signal : aux).push_back(v);
  o.require(signal.size() == 12 && aux.size() == 6, "unexpected variable counts");
  double worst = 0.0;
  Bits bits(b.registry.num_variables(), 0);
  for (std::uint32_t B = 0; B < (1U << signal.size()); ++B) {
    for (std::size_t t = 0; t < signal.size(); ++t) bits[signal[t]] = (B >> t) & 1U;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t C = 0; C < (1U << aux.size()); ++C) {
      for (std::size_t t = 0; t < aux.size(); ++t) bits[aux[t]] = (C >> t) & 1U;
      best = std::min(best, evaluate_qubo(b.model, bits));
    }
    const RealVector z = decode_signal(b.registry, bits);
    worst = std::max(worst, std::abs(best - oracle::l0_objective(A, x, z, params.gamma0)));
  }
  o.require(worst <= 1e-9, fmt("max gap %.3g", worst));
  if (o.pass) o.detail = fmt("4096 patterns, max gap %.2g", worst);
  return o;
}

Outcome global_optimum() {
  Outcome o;
  std::mt19937_64 rng(2002);
  const Quantizer q = Quantizer::unsigned_binary(3);
  const auto w = q.weights();
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const RealMatrix A = oracle::random_real(2, 4, rng);
    const RealVector x = oracle::random_real(2, 1, rng);
    const double g = 0.001;
    const QuboBuild b = build_l0_qubo(A, x, q, {g, 1.5, 1.5});
    o.require(b.model.num_vars() == 16, "expected 16 variables");
    const SolveResult ex = solve_exhaustive(b.model);
    // Brute force over every quantized signal, independent of the QUBO.
    double best = std::numeric_limits<double>::infinity();
    RealVector z(4);
    for (std::uint32_t B = 0; B < (1U << 12); ++B) {
      for (Eigen::Index i = 0; i < 4; ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < 3; ++k) v += ((B >> (3 * i + k)) & 1U) ? w[k] : 0.0;
        z(i) = v;
      }
      best = std::min(best, oracle::l0_objective(A, x, z, g));
    }
    worst = std::max(worst, std::abs(ex.best_energy - best));
  }
  o.require(worst <= 1e-9, fmt("max gap %.3g", worst));
  if (o.pass) o.detail = fmt("20 instances, max gap %.2g", worst);
  return o;
}

Outcome ising_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2003);
  std::size_t checks = 0;
  double worst = 0.0;
  for (int t = 0; t < 4; ++t) {
    const QuboModel m = oracle::random_model(10, rng);
    const IsingModel is = qubo_to_ising(m);
    const QuboModel back = ising_to_qubo(is);
    for (std::uint32_t v = 0; v < (1U << 10); ++v) {
      const Bits b = oracle::bits_of(v, 10);
      const double e = oracle::dense_energy(m, b);
      worst = std::max({worst, std::abs(is.energy(bits_to_spins(b)) - e), std::abs(evaluate_qubo(back, b) - e)});
      ++checks;
    }
  }
  o.require(worst <= 1e-12, fmt("max gap %.3g", worst));
  if (o.pass) o.detail = fmt("%zu checks, max gap %.2g", checks, worst);
  return o;
}

Outcome steering_identity() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t N = 1; N <= 16; ++N)
    for (std::size_t M = 1; M <= 64; ++M)
      worst = std::max(worst, (steering_matrix_arcsin(N, M) - steering_matrix_uniform({N, M, 0.5, GridKind::Arcsin}))
                                  .cwiseAbs()
                                  .maxCoeff());
  o.require(worst <= 1e-12, fmt("identity gap %.3g", worst));
  const auto phi = DoaGrid{8, 160, 0.5, GridKind::Arcsin}.angles();
  double gap = 0.0;
  for (std::size_t m = 1; m < phi.size(); ++m)
    if (std::abs(phi[m - 1]) <= std::numbers::pi / 4 && std::abs(phi[m]) <= std::numbers::pi / 4)
      gap = std::max(gap, phi[m] - phi[m - 1]);
  gap *= 180.0 / std::numbers::pi;
  o.require(gap < 1.0, fmt("resolution %.3f deg", gap));
  if (o.pass) o.detail = fmt("identity gap %.2g, resolution %.3f deg", worst, gap);
  return o;
}

Outcome delta_identity() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.noise_std = 0.01;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const SparseInstance inst = make_single_instance(cfg, 1 + t % 8, 3000 + t);
    // A reconstruction that keeps part of the support and adds a spurious entry.
    Rng rng(t);
    RealVector s = inst.truth.values();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) != 0.0) s(i) = Quantizer::unsigned_binary(4).round(s(i));
    s(static_cast<Eigen::Index>(rng() % s.size())) = 0.25;
    const DeltaDiagnostic d = delta_diagnostic(inst.A, inst.truth.values(), s, inst.noise, cfg.build.gamma0);
    const double scale = std::max({1.0, std::abs(d.fidelity_term), std::abs(d.noise_term)});
    worst = std::max(worst, std::abs(d.delta_direct - d.decomposed()) / scale);
  }
  o.require(worst <= 1e-9, fmt("max relative gap %.3g", worst));
  if (o.pass) o.detail = fmt("100 instances, max relative gap %.2g", worst);
  return o;
}

Outcome desk_recovery() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.grid_size = 16;
  cfg.sensors = 8;
  cfg.bits = 4;
  cfg.values = ValueMode::Grid;
  cfg.k_min = 1;
  cfg.k_max = 2;
  cfg.trials = 50;
  cfg.seed = 7;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double secs = seconds_since(t0);
  for (const auto& p : r.curve.points)
    o.require(p.method("qubo").success_rate >= 0.9, fmt("k=%zu rate %.2f", p.k, p.method("qubo").success_rate));
  o.require(secs < 120.0, fmt("runtime %.0f s", secs));
  o.detail = (o.pass ? "" : o.detail + "; ") + "qubo rates " + rates(r.curve, "qubo") + fmt(", %.1f s", secs);
  return o;
}

Outcome baseline_sanity() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.op = OperatorKind::Gaussian;
  int exact = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const SparseInstance inst = make_single_instance(cfg, 2, 4000 + t);
    const RealSystem sys = realify_for_real_signal(inst.A, inst.x);
    const OmpResult r = omp(sys.A, sys.x, cfg.baseline);
    exact += support(r.coefficients, 0.0) == inst.truth.support();
  }
  o.require(exact >= 95, fmt("OMP exact support %d/100", exact));

  std::mt19937_64 rng(2008);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const RealMatrix Q = Eigen::HouseholderQR<RealMatrix>(oracle::random_real(8, 8, rng)).householderQ();
    const RealVector x = oracle::random_real(8, 1, rng);
    const double g = 0.05;
    const RealVector c = Q.transpose() * x;
    const RealVector z = lasso_cd(Q, x, g).coefficients;
    for (Eigen::Index i = 0; i < 8; ++i) {
      const double st = c(i) > g ? c(i) - g : (c(i) < -g ? c(i) + g : 0.0);
      worst = std::max(worst, std::abs(z(i) - st));
    }
  }
  o.require(worst <= 1e-6, fmt("LASSO closed-form gap %.3g", worst));
  if (o.pass) o.detail = fmt("OMP exact support %d/100, LASSO gap %.2g", exact, worst);
  return o;
}

Outcome success_curve_trend() {
  Outcome o;
  ExperimentConfig cfg;  // M=32, N=8, K=4, gamma0=0.001, gamma1=0.0005, threshold 0.02
  cfg.k_min = 1;
  cfg.k_max = 8;
  cfg.trials = 100;
  cfg.seed = 9;
  cfg.schedule.beta0 = 0.003;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double secs = seconds_since(t0);
  for (const char* m : {"qubo", "omp", "lasso"})
    for (std::size_t i = 1; i < r.curve.points.size(); ++i) {
      const double prev = r.curve.points[i - 1].method(m).success_rate, cur = r.curve.points[i].method(m).success_rate;
      o.require(cur <= prev + 0.05, fmt("%s rises at k=%zu (%.2f -> %.2f)", m, r.curve.points[i].k, prev, cur));
    }
  for (const auto& p : r.curve.points)
    if (p.k >= 3 && p.k <= 6) {
      const double q = p.method("qubo").success_rate, om = p.method("omp").success_rate;
      o.require(std::abs(q - om) <= 0.15, fmt("k=%zu qubo %.2f vs omp %.2f", p.k, q, om));
    }
  o.require(secs < 900.0, fmt("runtime %.0f s", secs));
  o.detail = (o.pass ? "" : o.detail + "; ") + "qubo " + rates(r.curve, "qubo") + " | omp " + rates(r.curve, "omp") +
             " | lasso " + rates(r.curve, "lasso") + fmt(", %.0f s", secs);
  return o;
}

Outcome multishot_pipeline() {
  Outcome o;
  ExperimentConfig cfg = default_config(Scenario::MultiShot).experiment;
  cfg.grid_size = 16;
  cfg.sensors = 8;
  cfg.shots = 16;
  cfg.basis_columns = 2;
  cfg.fluctuation = 0.1;
  cfg.noise_std = 0.0;
  cfg.k_min = 1;
  cfg.k_max = 2;
  cfg.trials = 50;
  cfg.seed = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double secs = seconds_since(t0);
  for (const auto& p : r.curve.points)
    for (const char* m : {"l0_svd", "l1_svd"})
      o.require(p.method(m).success_rate >= 0.8, fmt("k=%zu %s rate %.2f", p.k, m, p.method(m).success_rate));
  std::size_t shared = 0;
  for (const auto& rec : r.records) shared += rec.shots_share_support;
  o.require(shared == r.records.size(), fmt("shot supports differ in %zu trials", r.records.size() - shared));
  o.require(secs < 600.0, fmt("runtime %.0f s", secs));
  o.detail = (o.pass ? "" : o.detail + "; ") + "l0_svd " + rates(r.curve, "l0_svd") + " | l1_svd " +
             rates(r.curve, "l1_svd") + " | lasso_avg " + rates(r.curve, "lasso_avg") + fmt(", %.0f s", secs);
  return o;
}

Outcome determinism() {
  Outcome o;
  for (Scenario s : {Scenario::Single, Scenario::MultiShot}) {
    ExperimentConfig cfg = default_config(s).experiment;
    cfg.grid_size = 12;
    cfg.sensors = 6;
    cfg.shots = 4;
    cfg.noise_std = 0.01;
    cfg.schedule.sweeps = 100;
    cfg.schedule.reads = 5;
    cfg.k_min = 1;
    cfg.k_max = 3;
    cfg.trials = 4;
    cfg.seed = 11;
    cfg.threads = 1;
    const std::string a = curve_to_csv(run_experiment(cfg).curve);
    const std::string b = curve_to_csv(run_experiment(cfg).curve);
    cfg.threads = 4;
    const std::string c = curve_to_csv(run_experiment(cfg).curve);
    o.require(a == b && a == c, fmt("%s CSV differs between runs", s == Scenario::Single ? "single" : "multishot"));
  }
  if (o.pass) o.detail = "single and multishot CSVs byte-identical across runs and thread counts";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const double none = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria = {
      {"penalty gadget truth table", penalty_truth_table, 1e-3},
      {"gadget exactness oracle", gadget_exactness, 30.0},
      {"global-optimum equivalence", global_optimum, 60.0},
      {"Ising conversion", ising_equivalence, none},
      {"steering identity and grid resolution", steering_identity, none},
      {"delta identity", delta_identity, none},
      {"desk-scale recovery", desk_recovery, 120.0},
      {"baseline sanity", baseline_sanity, none},
      {"success-curve trend", success_curve_trend, 900.0},
      {"multi-shot pipeline", multishot_pipeline, 600.0},
      {"determinism", determinism, none},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    if (secs >= criteria[i].limit_seconds) {
      o.pass = false;
      o.detail += fmt("; exceeded %.3g s limit", criteria[i].limit_seconds);
    }
    std::printf("%s criterion %zu (%s): %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
