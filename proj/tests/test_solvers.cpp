#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace l0qubo;

TEST(Exhaustive, SingleVariable) {
  QuboModel m(1);
  m.add_linear(0, -1.0);
  m.add_offset(0.5);
  SolveResult r = solve_exhaustive(m);
  EXPECT_EQ(r.best, Bits{1});
  EXPECT_EQ(r.best_energy, -0.5);

  QuboModel p(1);
  p.add_linear(0, 1.0);
  r = solve_exhaustive(p);
  EXPECT_EQ(r.best, Bits{0});
  EXPECT_EQ(r.best_energy, 0.0);
}

TEST(Exhaustive, MatchesNaiveScan) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    const QuboModel m = oracle::random_model(10, rng);
    const auto [bits, e] = oracle::brute_force_min(m);
    const SolveResult r = solve_exhaustive(m);
    EXPECT_EQ(r.best, bits);
    EXPECT_EQ(r.best_energy, e);
  }
}

TEST(Exhaustive, TiesGoToLowestBinaryValue) {
  QuboModel m(3);  // every assignment has energy 0
  EXPECT_EQ(solve_exhaustive(m).best, Bits(3, 0));
  QuboModel two(2);  // b0 + b1 - 2 b0 b1 - 1: minimum -1 at 00 and 11
  two.add_linear(0, 1.0);
  two.add_linear(1, 1.0);
  two.add(0, 1, -2.0);
  two.add_offset(-1.0);
  EXPECT_EQ(solve_exhaustive(two).best, (Bits{0, 0}));
  QuboModel neg(2);  // minimum at 01 and 10; 01 means b0 = 1
  neg.add_linear(0, -1.0);
  neg.add_linear(1, -1.0);
  neg.add(0, 1, 3.0);
  EXPECT_EQ(solve_exhaustive(neg).best, (Bits{1, 0}));
}

TEST(Exhaustive, RefusesLargeModels) {
  EXPECT_THROW(solve_exhaustive(QuboModel(25)), SolveError);
  EXPECT_THROW(solve_exhaustive(QuboModel(10), 8), SolveError);
  try {
    solve_exhaustive(QuboModel(30));
  } catch (const SolveError& e) {
    EXPECT_NE(std::string(e.what()).find("30 variables"), std::string::npos);
  }
}

TEST(Exhaustive, BeatsRandomAssignments) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> size(1, 16);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = size(rng);
    const QuboModel m = oracle::random_model(n, rng);
    const SolveResult r = solve_exhaustive(m);
    EXPECT_NEAR(r.best_energy, r.tracked_energy, 1e-9);
    for (int s = 0; s < 10000; ++s) EXPECT_LE(r.best_energy, evaluate_qubo(m, oracle::bits_of(rng(), n)) + 1e-12);
  }
}

TEST(Exhaustive, TrackedEnergySurvivesResync) {
  std::mt19937_64 rng(43);
  const QuboModel m = oracle::random_model(18, rng, 100.0);
  const SolveResult r = solve_exhaustive(m);
  EXPECT_NEAR(r.tracked_energy, evaluate_qubo(m, r.best), 1e-9);
}

TEST(FlipDelta, Examples) {
  const QuboAdjacency zero(QuboModel(3));
  EXPECT_EQ(flip_delta(zero, Bits{1, 0, 1}, 1), 0.0);
  QuboModel m(2);
  m.add_linear(1, 2.5);
  const QuboAdjacency adj(m);
  EXPECT_EQ(flip_delta(adj, Bits{0, 0}, 1), 2.5);
  EXPECT_EQ(flip_delta(adj, Bits{0, 1}, 1), -2.5);
  EXPECT_THROW(flip_delta(adj, Bits{0, 1}, 2), InputError);
}

TEST(FlipDelta, MatchesFullEvaluation) {
  std::mt19937_64 rng(44);
  const QuboModel m = oracle::random_model(20, rng);
  const QuboAdjacency adj(m);
  for (int t = 0; t < 1000; ++t) {
    Bits b = oracle::bits_of(rng(), 20);
    const std::size_t i = rng() % 20;
    const double before = evaluate_qubo(m, b);
    const double d = flip_delta(adj, b, i);
    b[i] ^= 1U;
    EXPECT_NEAR(d, evaluate_qubo(m, b) - before, 1e-12);
  }
}

TEST(Adjacency, EnergyMatchesEvaluate) {
  std::mt19937_64 rng(45);
  const QuboModel m = oracle::random_model(15, rng);
  const QuboAdjacency adj(m);
  for (int t = 0; t < 100; ++t) {
    const Bits b = oracle::bits_of(rng(), 15);
    EXPECT_NEAR(adj.energy(b), evaluate_qubo(m, b), 1e-12);
  }
}

TEST(Schedule, GeometricAndIncreasing) {
  AnnealSchedule s;
  EXPECT_DOUBLE_EQ(s.beta_at(0), s.beta0);
  EXPECT_DOUBLE_EQ(s.beta_at(s.sweeps - 1), s.beta1);
  for (std::size_t i = 1; i < s.sweeps; ++i) EXPECT_GT(s.beta_at(i), s.beta_at(i - 1));
  AnnealSchedule bad;
  bad.beta1 = bad.beta0;
  EXPECT_THROW(bad.validate(), InputError);
  bad = {};
  bad.reads = 0;
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(Anneal, ZeroModelReturnsOffset) {
  QuboModel m(5);
  m.add_offset(2.0);
  AnnealSchedule s;
  s.sweeps = 10;
  s.reads = 3;
  const SolveResult r = solve_sa(m, s);
  EXPECT_EQ(r.best_energy, 2.0);
  EXPECT_EQ(r.read_energies.size(), 3U);
}

TEST(Anneal, FindsUniqueMinimumOfTwoVariables) {
  QuboModel m(2);
  m.add_linear(0, -1.0);
  m.add_linear(1, 0.5);
  m.add(0, 1, -1.0);
  AnnealSchedule s;
  s.sweeps = 100;
  s.reads = 100;
  s.seed = 7;
  const SolveResult r = solve_sa(m, s);
  const SolveResult ex = solve_exhaustive(m);
  EXPECT_EQ(r.best, ex.best);
  EXPECT_EQ(r.best_energy, ex.best_energy);
}

TEST(Anneal, DeterministicGivenSeed) {
  std::mt19937_64 rng(46);
  const QuboModel m = oracle::random_model(30, rng);
  AnnealSchedule s;
  s.sweeps = 50;
  s.reads = 10;
  s.seed = 123;
  const SolveResult a = solve_sa(m, s), b = solve_sa(m, s);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.best_energy, b.best_energy);
  EXPECT_EQ(a.read_energies, b.read_energies);
  s.seed = 124;
  EXPECT_NE(solve_sa(m, s).read_energies, a.read_energies);
}

TEST(Anneal, ReadsAreIndependentOfReadCount) {
  std::mt19937_64 rng(47);
  const QuboModel m = oracle::random_model(12, rng);
  AnnealSchedule s;
  s.sweeps = 20;
  s.reads = 4;
  const SolveResult few = solve_sa(m, s);
  s.reads = 8;
  const SolveResult many = solve_sa(m, s);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(few.read_energies[r], many.read_energies[r]);
}

TEST(Anneal, ResultInvariants) {
  std::mt19937_64 rng(48);
  std::uniform_int_distribution<std::size_t> size(2, 16);
  for (int t = 0; t < 30; ++t) {
    const QuboModel m = oracle::random_model(size(rng), rng);
    AnnealSchedule s;
    s.sweeps = 30;
    s.reads = 5;
    s.seed = static_cast<std::uint64_t>(t);
    const SolveResult r = solve_sa(m, s);
    EXPECT_EQ(r.best_energy, evaluate_qubo(m, r.best));
    for (double e : r.read_energies) EXPECT_LE(r.best_energy, e);
    EXPECT_GE(r.best_energy, solve_exhaustive(m).best_energy - 1e-12);
    EXPECT_NEAR(r.tracked_energy, r.best_energy, 1e-9);
  }
}

TEST(Anneal, TrackedEnergyOnLargeCoefficients) {
  std::mt19937_64 rng(49);
  const QuboModel m = oracle::random_model(60, rng, 500.0);
  AnnealSchedule s;
  s.sweeps = 200;
  s.reads = 3;
  const SolveResult r = solve_sa(m, s);
  EXPECT_NEAR(r.tracked_energy, r.best_energy, 1e-9 * std::max(1.0, std::abs(r.best_energy)));
}

TEST(Seeds, CombineIsStableAndSpread) {
  static_assert(combine_seed(1, 2) == combine_seed(1, 2));
  EXPECT_NE(combine_seed(1, 2), combine_seed(2, 1));
  EXPECT_NE(combine_seed(0, 0), combine_seed(0, 1));
}
