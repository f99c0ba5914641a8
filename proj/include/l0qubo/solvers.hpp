#pragma once

// QUBO minimizers: Gray-code exhaustive enumeration and single-flip
// Metropolis simulated annealing, both with incrementally maintained local
// fields.

#include "l0qubo/qubo.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace l0qubo {

/// Compressed adjacency of a QuboModel for O(degree) flip evaluation.
class QuboAdjacency {
 public:
  explicit QuboAdjacency(const QuboModel& m) : n_(m.num_vars()), offset_(m.offset()), diag_(n_, 0.0), start_(n_ + 1, 0) {
    for (const auto& [key, v] : m.entries()) {
      if (key.first == key.second) {
        diag_[key.first] = v;
      } else {
        ++start_[key.first + 1];
        ++start_[key.second + 1];
      }
    }
    for (std::size_t i = 0; i < n_; ++i) start_[i + 1] += start_[i];
    nbr_.resize(start_[n_]);
    weight_.resize(start_[n_]);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (const auto& [key, v] : m.entries()) {
      if (key.first == key.second) continue;
      nbr_[fill[key.first]] = static_cast<std::uint32_t>(key.second);
      weight_[fill[key.first]++] = v;
      nbr_[fill[key.second]] = static_cast<std::uint32_t>(key.first);
      weight_[fill[key.second]++] = v;
    }
  }

  std::size_t num_vars() const noexcept { return n_; }
  double offset() const noexcept { return offset_; }
  double diagonal(std::size_t i) const { return diag_[i]; }
  std::size_t degree(std::size_t i) const { return start_[i + 1] - start_[i]; }

  template <class F>
  void for_each_neighbor(std::size_t i, F&& f) const {
    for (std::size_t e = start_[i]; e < start_[i + 1]; ++e) f(static_cast<std::size_t>(nbr_[e]), weight_[e]);
  }

  /// sum_j Q_ij b_j over off-diagonal neighbours of i.
  double local_field(std::span<const std::uint8_t> bits, std::size_t i) const {
    double f = 0.0;
    for (std::size_t e = start_[i]; e < start_[i + 1]; ++e)
      if (bits[nbr_[e]]) f += weight_[e];
    return f;
  }

  double energy(std::span<const std::uint8_t> bits) const {
    require_assignment(n_, bits.size());
    double e = offset_, pairs = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!bits[i]) continue;
      e += diag_[i];
      pairs += local_field(bits, i);
    }
    return e + pairs / 2.0;
  }

 private:
  std::size_t n_;
  double offset_;
  std::vector<double> diag_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> nbr_;
  std::vector<double> weight_;
};

/// E(b with bit i flipped) - E(b).
inline double flip_delta(const QuboAdjacency& adj, std::span<const std::uint8_t> bits, std::size_t i) {
  require_assignment(adj.num_vars(), bits.size());
  if (i >= adj.num_vars()) throw InputError("flip index out of range");
  const double d = adj.diagonal(i) + adj.local_field(bits, i);
  return bits[i] ? -d : d;
}

struct SolveResult {
  Bits best;
  double best_energy = 0.0;
  std::vector<double> read_energies;
  double wall_ms = 0.0;
  std::size_t reads = 0;
  /// Incrementally tracked energy of the best state, before re-evaluation.
  double tracked_energy = 0.0;
};

struct AnnealSchedule {
  double beta0 = 0.1;
  double beta1 = 50.0;
  std::size_t sweeps = 1000;
  std::size_t reads = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(std::isfinite(beta0) && beta0 > 0.0)) throw InputError("beta0 must be positive");
    if (!(std::isfinite(beta1) && beta1 > beta0)) throw InputError("beta1 must exceed beta0");
    if (sweeps < 1) throw InputError("sweeps must be at least 1");
    if (reads < 1) throw InputError("reads must be at least 1");
  }

  /// Geometric interpolation from beta0 (first sweep) to beta1 (last sweep).
  double beta_at(std::size_t sweep) const {
    if (sweeps == 1) return beta1;
    const double t = static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
    return beta0 * std::pow(beta1 / beta0, t);
  }
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) noexcept { return mix_seed(mix_seed(a) ^ b); }

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Global minimum by Gray-code enumeration of all 2^n assignments. Ties go
/// to the assignment with the smallest binary value (bit i weighted 2^i).
inline SolveResult solve_exhaustive(const QuboModel& m, std::size_t max_bits = 24) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = m.num_vars();
  if (n > max_bits || n > 40)
    throw SolveError("exhaustive search refused: " + std::to_string(n) + " variables exceeds the cap of " +
                     std::to_string(std::min<std::size_t>(max_bits, 40)));

  // Dense symmetric couplings, diagonal kept separately.
  std::vector<double> coup(n * n, 0.0), diag(n, 0.0);
  for (const auto& [key, v] : m.entries()) {
    if (key.first == key.second) {
      diag[key.first] = v;
    } else {
      coup[key.first * n + key.second] = v;
      coup[key.second * n + key.first] = v;
    }
  }

  Bits bits(n, 0);
  std::vector<double> field(n, 0.0);
  double energy = m.offset();
  double best_energy = energy;
  std::uint64_t gray = 0, best_gray = 0;

  auto resync = [&] {
    energy = m.offset();
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (bits[j]) f += coup[i * n + j];
      field[i] = f;
      if (bits[i]) energy += diag[i] + f / 2.0;
    }
  };

  const std::uint64_t total = std::uint64_t{1} << n;
  constexpr std::uint64_t kResyncMask = (std::uint64_t{1} << 16) - 1;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto i = static_cast<std::size_t>(std::countr_zero(step));
    const double d = diag[i] + field[i];
    const double sign = bits[i] ? -1.0 : 1.0;
    energy += sign * d;
    bits[i] ^= 1U;
    gray ^= std::uint64_t{1} << i;
    const double* row = &coup[i * n];
    for (std::size_t j = 0; j < n; ++j) field[j] += sign * row[j];
    if ((step & kResyncMask) == 0) resync();
    if (energy < best_energy || (energy == best_energy && gray < best_gray)) {
      best_energy = energy;
      best_gray = gray;
    }
  }

  SolveResult r;
  r.best.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.best[i] = static_cast<std::uint8_t>((best_gray >> i) & 1U);
  r.best_energy = evaluate_qubo(m, r.best);
  r.tracked_energy = best_energy;
  r.read_energies = {r.best_energy};
  r.reads = 1;
  r.wall_ms = detail::elapsed_ms(t0);
  return r;
}

struct AnnealState {
  Bits bits;
  double tracked_energy = 0.0;
};

/// One annealing read from a random start; returns the final state.
inline AnnealState anneal_read(const QuboAdjacency& adj, const AnnealSchedule& sched, std::uint64_t seed) {
  const std::size_t n = adj.num_vars();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Bits bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>(rng() >> 63);
  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) field[i] = adj.local_field(bits, i);
  double energy = adj.energy(bits);

  // exp(-40) is far below the resolution of the uniform draw.
  constexpr double kRejectAbove = 40.0;
  for (std::size_t s = 0; s < sched.sweeps; ++s) {
    const double beta = sched.beta_at(s);
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = adj.diagonal(i) + field[i];
      const double delta = bits[i] ? -raw : raw;
      if (delta > 0.0) {
        const double x = beta * delta;
        if (x > kRejectAbove || unit(rng) >= std::exp(-x)) continue;
      }
      const double sign = bits[i] ? -1.0 : 1.0;
      energy += delta;
      bits[i] ^= 1U;
      adj.for_each_neighbor(i, [&](std::size_t j, double w) { field[j] += sign * w; });
    }
  }
  return {std::move(bits), energy};
}

/// Best of sched.reads independent annealing reads. Read r uses the
/// sub-seed combine_seed(sched.seed, r), so results do not depend on
/// execution order.
inline SolveResult solve_sa(const QuboModel& m, const AnnealSchedule& sched) {
  sched.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const QuboAdjacency adj(m);
  SolveResult r;
  r.reads = sched.reads;
  r.read_energies.reserve(sched.reads);
  r.best_energy = std::numeric_limits<double>::infinity();
  for (std::size_t read = 0; read < sched.reads; ++read) {
    AnnealState st = anneal_read(adj, sched, combine_seed(sched.seed, read));
    const double e = evaluate_qubo(m, st.bits);
    r.read_energies.push_back(e);
    if (e < r.best_energy) {
      r.best_energy = e;
      r.tracked_energy = st.tracked_energy;
      r.best = std::move(st.bits);
    }
  }
  r.wall_ms = detail::elapsed_ms(t0);
  return r;
}

}  // namespace l0qubo
