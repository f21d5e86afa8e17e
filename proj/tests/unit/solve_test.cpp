#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sepcd/error.hpp"
#include "sepcd/solve.hpp"

namespace sepcd {
namespace {

BitVector bits(std::uint64_t code, std::size_t n) {
  BitVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(code >> i & 1U);
  return x;
}

QuboProblem random_qubo(std::size_t n, double density, bool integral, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::bernoulli_distribution keep(density);
  auto draw = [&] { return integral ? std::round(coef(rng)) : coef(rng); };
  QuboBuilder b(n);
  for (VarIndex i = 0; i < n; ++i) {
    b.add_linear(i, draw());
    for (VarIndex j = i + 1; j < n; ++j) {
      if (keep(rng)) b.add_quadratic(i, j, draw());
    }
  }
  b.add_offset(integral ? 2.0 : 0.25);
  return b.build();
}

std::pair<double, std::uint64_t> brute_force(const QuboProblem& q) {
  double best = q.energy(bits(0, q.num_vars()));
  std::uint64_t best_code = 0;
  for (std::uint64_t code = 1; code < (std::uint64_t{1} << q.num_vars()); ++code) {
    const double e = q.energy(bits(code, q.num_vars()));
    if (e < best) {
      best = e;
      best_code = code;
    }
  }
  return {best, best_code};
}

TEST(AnnealSchedule, Validation) {
  AnnealSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.final_temp = 0.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = {};
  s.initial_temp = 1e-4;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = {};
  s.sweeps = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = {};
  s.restarts = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(AnnealSchedule, DefaultsFollowLargestCoefficient) {
  const QuboProblem q = QuboBuilder(2).add_linear(0, -1).add_quadratic(0, 1, 4).build();
  EXPECT_EQ(AnnealSchedule::defaults_for(q, 9).initial_temp, 4.0);
  EXPECT_EQ(AnnealSchedule::defaults_for(q, 9).seed, 9u);
  EXPECT_EQ(AnnealSchedule::defaults_for(QuboProblem{}).initial_temp, 1.0);
}

TEST(Exhaustive, MatchesBruteForceWithLowestCodeTies) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const QuboProblem q = random_qubo(n, 0.4, trial % 2 == 0, rng);
    const auto [best, code] = brute_force(q);
    const SolverResult r = exhaustive(q);
    EXPECT_NEAR(r.best_energy, best, 1e-9);
    if (q.is_integral()) {
      EXPECT_EQ(r.best_x, bits(code, n));
    }
    EXPECT_EQ(r.evaluations, std::uint64_t{1} << n);
    EXPECT_NEAR(q.energy(r.best_x), r.best_energy, 1e-9);
  }
}

TEST(Exhaustive, RejectsLargeProblems) {
  EXPECT_THROW(exhaustive(QuboBuilder(kMaxExhaustiveVars + 1).build()), InvalidArgument);
}

TEST(AllMinimizers, ListsEveryTieInOrder) {
  // -x0 - x1 + 2 x0 x1 is -1 at 01 and 10.
  const QuboProblem q = QuboBuilder(3).add_linear(0, -1).add_linear(1, -1).add_quadratic(0, 1, 2).build();
  const auto all = all_minimizers(q);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0], (BitVector{1, 0, 0}));
  EXPECT_EQ(all[1], (BitVector{0, 1, 0}));
  EXPECT_EQ(all[2], (BitVector{1, 0, 1}));
  EXPECT_EQ(all[3], (BitVector{0, 1, 1}));
}

TEST(Anneal, EmptyProblemReturnsOffset) {
  const SolverResult r = anneal(QuboBuilder(0).add_offset(3.0).build(), AnnealSchedule{});
  EXPECT_TRUE(r.best_x.empty());
  EXPECT_EQ(r.best_energy, 3.0);
}

TEST(Anneal, NeverBelowOptimumAndUsuallyOptimal) {
  std::mt19937_64 rng(23);
  int hits = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const QuboProblem q = random_qubo(n, 0.3, trial % 2 == 0, rng);
    AnnealSchedule s = AnnealSchedule::defaults_for(q, static_cast<std::uint64_t>(trial));
    s.sweeps = 300;
    s.restarts = 8;
    const SolverResult r = anneal(q, s);
    const double opt = exhaustive(q).best_energy;
    EXPECT_GE(r.best_energy, opt - 1e-9);
    EXPECT_NEAR(q.energy(r.best_x), r.best_energy, 1e-9);
    ASSERT_EQ(r.energy_trace.size(), s.restarts);
    EXPECT_EQ(r.evaluations, std::uint64_t{s.sweeps} * s.restarts * n);
    hits += std::abs(r.best_energy - opt) < 1e-9;
  }
  EXPECT_GE(hits, trials - 2);
}

TEST(Anneal, TrackedEnergyMatchesRecomputation) {
  std::mt19937_64 rng(29);
  for (bool integral : {true, false}) {
    const QuboProblem q = random_qubo(12, 0.4, integral, rng);
    AnnealSchedule s = AnnealSchedule::defaults_for(q, 5);
    s.sweeps = 50;
    s.restarts = 3;
    std::size_t calls = 0;
    anneal(q, s, 1, [&](const SweepState& st) {
      ++calls;
      ASSERT_NEAR(st.tracked_energy, q.energy(st.x), 1e-9);
    });
    EXPECT_EQ(calls, 150u);
  }
}

TEST(Anneal, DeterministicAcrossJobCounts) {
  std::mt19937_64 rng(31);
  const QuboProblem q = random_qubo(14, 0.3, false, rng);
  AnnealSchedule s = AnnealSchedule::defaults_for(q, 77);
  s.sweeps = 100;
  s.restarts = 6;
  const SolverResult a = anneal(q, s, 1);
  const SolverResult b = anneal(q, s, 3);
  EXPECT_EQ(a.best_x, b.best_x);
  EXPECT_EQ(a.best_energy, b.best_energy);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
  s.seed = 78;
  const SolverResult c = anneal(q, s, 1);
  EXPECT_EQ(c.energy_trace.size(), a.energy_trace.size());
}

TEST(Anneal, SeparationQuboOfPathCut) {
  // 0-1-2 with separating edge 1-2: optimum flags exactly one of {1, 2}.
  const Graph g = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}});
  EdgeScoreMap s;
  s.scores = {1.0, -1.0};
  s.labels = {0, 1};
  const QuboProblem q = build_separation_qubo(g, s);
  const SolverResult r = anneal(q, AnnealSchedule::defaults_for(q, 1));
  EXPECT_EQ(r.best_energy, -2.0);
  EXPECT_EQ(r.best_x[0], 1);
  EXPECT_EQ(r.best_x[1] + r.best_x[2], 1);
}

}  // namespace
}  // namespace sepcd
