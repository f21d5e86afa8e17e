#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "sepcd/error.hpp"
#include "sepcd/metrics.hpp"
#include "sepcd/pipeline.hpp"
#include "sepcd/sbm.hpp"

namespace sepcd {
namespace {

Graph make(std::size_t n, std::vector<Edge> edges) { return Graph::from_edges(n, edges); }

// Two triangles {0,1,2} and {4,5,6} linked through node 3.
Graph bowtie_with_hub() {
  return make(7, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}});
}

// Plain quadratic greedy: every round rescans all unassigned nodes.
std::vector<CommunityId> naive_greedy(const Graph& g, const std::vector<std::vector<NodeId>>& cores,
                                      const std::vector<NodeId>& sep) {
  constexpr CommunityId none = static_cast<CommunityId>(-1);
  std::vector<CommunityId> a(g.num_nodes(), none);
  for (std::size_t c = 0; c < cores.size(); ++c) {
    for (NodeId v : cores[c]) a[v] = static_cast<CommunityId>(c);
  }
  for (;;) {
    std::size_t best_count = 0;
    NodeId best_node = 0;
    CommunityId best_c = 0;
    for (NodeId s : sep) {
      if (a[s] != none) continue;
      std::vector<std::size_t> count(cores.size(), 0);
      for (NodeId t : g.neighbors(s)) {
        if (a[t] != none) ++count[a[t]];
      }
      for (CommunityId c = 0; c < cores.size(); ++c) {
        if (count[c] > best_count) {
          best_count = count[c];
          best_node = s;
          best_c = c;
        }
      }
    }
    if (best_count == 0) break;
    a[best_node] = best_c;
  }
  oracle::UnionFind uf(g.num_nodes());
  for (const Edge& e : g.edges()) {
    if (a[e.u] == none && a[e.v] == none) uf.unite(e.u, e.v);
  }
  std::map<std::size_t, CommunityId> fresh;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (a[v] != none) continue;
    auto [it, added] = fresh.emplace(uf.find(v), static_cast<CommunityId>(cores.size() + fresh.size()));
    a[v] = it->second;
  }
  return a;
}

TEST(ValidateSeparationSet, HubRemovalIsValidInjectiveSurjective) {
  const Graph g = bowtie_with_hub();
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 1, 1, 1});
  const std::vector<NodeId> sep{3};
  const SeparationResult r = validate_separation_set(g, truth, sep);
  EXPECT_TRUE(r.is_valid);
  EXPECT_TRUE(r.is_injective);
  EXPECT_TRUE(r.is_surjective);
  ASSERT_EQ(r.cores.size(), 2u);
  EXPECT_EQ(r.refinement, (std::vector<std::optional<CommunityId>>{0, 1}));
}

TEST(ValidateSeparationSet, EmptySetOnConnectedGraphIsInvalid) {
  const Graph g = bowtie_with_hub();
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 1, 1, 1});
  const SeparationResult r = validate_separation_set(g, truth, {});
  EXPECT_FALSE(r.is_valid);
  EXPECT_FALSE(r.is_injective);
  EXPECT_FALSE(r.is_surjective);
  EXPECT_EQ(r.refinement, (std::vector<std::optional<CommunityId>>{std::nullopt}));
}

TEST(ValidateSeparationSet, NonInjectiveSplit) {
  // Removing 1 splits community 0 into {0} and {2}.
  const Graph g = make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 1, 1});
  const std::vector<NodeId> sep{1, 3};
  const SeparationResult r = validate_separation_set(g, truth, sep);
  EXPECT_TRUE(r.is_valid);
  EXPECT_FALSE(r.is_injective);
  EXPECT_TRUE(r.is_surjective);
}

TEST(ValidateSeparationSet, ValidButNotSurjective) {
  // Swallowing all of community 1 still leaves a valid set.
  const Graph g = bowtie_with_hub();
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 1, 1, 1});
  const std::vector<NodeId> sep{4, 5, 6};
  const SeparationResult r = validate_separation_set(g, truth, sep);
  EXPECT_TRUE(r.is_valid);
  EXPECT_TRUE(r.is_injective);
  EXPECT_FALSE(r.is_surjective);
}

TEST(ValidateSeparationSet, RejectsBadInput) {
  const Graph g = bowtie_with_hub();
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 1, 1, 1});
  EXPECT_THROW(validate_separation_set(g, truth, std::vector<NodeId>{7}), InvalidArgument);
  EXPECT_THROW(validate_separation_set(g, truth, std::vector<NodeId>{2, 2}), InvalidArgument);
  EXPECT_THROW(validate_separation_set(g, Partition(std::vector<CommunityId>{0}), {}),
               InvalidArgument);
}

TEST(ValidateSeparationSet, MatchesBruteForceOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng() % 6;
    const Graph g = oracle::random_graph(n, 0.45, rng);
    const auto labels = oracle::random_labels(n, 2, rng);
    const Partition truth(labels);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      BitVector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(mask >> i & 1U);
      const SeparationResult r = validate_separation_set(g, truth, flagged_nodes(x));
      ASSERT_EQ(r.is_valid, oracle::valid_separation(g, labels, mask));
    }
  }
}

TEST(FlaggedNodes, ZerosAreSeparationNodes) {
  EXPECT_EQ(flagged_nodes(BitVector{1, 0, 1, 0}), (std::vector<NodeId>{1, 3}));
  EXPECT_TRUE(flagged_nodes(BitVector{1, 1}).empty());
}

TEST(GreedyAssign, HubJoinsLargerSide) {
  // Hub 3 has two edges into {0,1,2} and one into {4,5}.
  const Graph g = make(6, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {3, 4}, {4, 5}});
  GreedyStats stats;
  const Partition p = greedy_assign(g, {{0, 1, 2}, {4, 5}}, std::vector<NodeId>{3}, &stats);
  EXPECT_EQ(p.assignment(), (std::vector<CommunityId>{0, 0, 0, 0, 1, 1}));
  EXPECT_EQ(stats.count_updates, 3u);
  EXPECT_EQ(stats.selection_rounds, 1u);
  EXPECT_EQ(stats.leftover_communities, 0u);
}

TEST(GreedyAssign, TiesGoToLowestCommunity) {
  const Graph g = bowtie_with_hub();
  const Partition p = greedy_assign(g, {{0, 1, 2}, {4, 5, 6}}, std::vector<NodeId>{3});
  EXPECT_EQ(p.community(3), 0u);
}

TEST(GreedyAssign, ChainsThroughSeparationNodes) {
  // 0 - 1 - 2 - 3 with only node 0 in a core.
  const Graph g = make(4, {{0, 1}, {1, 2}, {2, 3}});
  GreedyStats stats;
  const Partition p = greedy_assign(g, {{0}}, std::vector<NodeId>{1, 2, 3}, &stats);
  EXPECT_EQ(p.assignment(), (std::vector<CommunityId>{0, 0, 0, 0}));
  EXPECT_EQ(stats.selection_rounds, 3u);
}

TEST(GreedyAssign, IsolatedLeftoversBecomeCommunities) {
  // 3-4 and 5 never touch the core.
  const Graph g = make(6, {{0, 1}, {1, 2}, {3, 4}});
  GreedyStats stats;
  const Partition p = greedy_assign(g, {{0, 1}}, std::vector<NodeId>{2, 3, 4, 5}, &stats);
  EXPECT_EQ(p.assignment(), (std::vector<CommunityId>{0, 0, 0, 1, 1, 2}));
  EXPECT_EQ(stats.leftover_communities, 2u);
}

TEST(GreedyAssign, RejectsInconsistentInput) {
  const Graph g = make(3, {{0, 1}, {1, 2}});
  EXPECT_THROW(greedy_assign(g, {{0}}, std::vector<NodeId>{1}), InvalidArgument);
  EXPECT_THROW(greedy_assign(g, {{0, 1}}, std::vector<NodeId>{1, 2}), InvalidArgument);
  EXPECT_THROW(greedy_assign(g, {{0}, {}}, std::vector<NodeId>{1, 2}), InvalidArgument);
}

TEST(GreedyAssign, MatchesNaiveOracleAndBoundsWork) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6 + rng() % 30;
    const Graph g = oracle::random_graph(n, 0.15, rng);
    std::vector<bool> kept(n);
    std::vector<NodeId> sep;
    for (NodeId v = 0; v < n; ++v) {
      kept[v] = rng() % 3 != 0;
      if (!kept[v]) sep.push_back(v);
    }
    const auto cores = connected_components(g, kept);
    GreedyStats stats;
    const Partition p = greedy_assign(g, cores, sep, &stats);
    ASSERT_EQ(p.assignment(), naive_greedy(g, cores, sep)) << trial;
    std::size_t sep_degree = 0;
    for (NodeId s : sep) sep_degree += g.degree(s);
    EXPECT_LE(stats.count_updates, sep_degree);
    EXPECT_LE(stats.selection_rounds, sep.size());
  }
}

TEST(ClampedAssign, HubJoinsDenserSide) {
  const Graph g = make(7, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {4, 6}});
  SolverSettings solver;
  solver.kind = SolverKind::Exhaustive;
  ClampedStats stats;
  const Partition p =
      clamped_modularity_assign(g, {{0, 1, 2}, {4, 5, 6}}, std::vector<NodeId>{3}, solver, 2.0, &stats);
  EXPECT_EQ(p.community(3), 0u);
  EXPECT_EQ(stats.num_vars, 2u);
  EXPECT_EQ(stats.repaired_nodes, 0u);
  EXPECT_NEAR(stats.energy, -modularity(g, p), 1e-12);
}

TEST(ClampedAssign, ExhaustiveMatchesBestModularity) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 10;
    Graph g;
    do g = oracle::random_graph(n, 0.35, rng); while (g.num_edges() == 0);
    std::vector<bool> kept(n, true);
    std::vector<NodeId> sep{7, 8, 9};
    for (NodeId s : sep) kept[s] = false;
    const auto cores = connected_components(g, kept);
    if (cores.size() < 2 || cores.size() > 4) continue;
    SolverSettings solver;
    solver.kind = SolverKind::Exhaustive;
    const Partition p = clamped_modularity_assign(g, cores, sep, solver);
    // Every one-hot completion of the three free nodes.
    double best = -1.0;
    std::vector<CommunityId> base(n);
    for (std::size_t c = 0; c < cores.size(); ++c) {
      for (NodeId v : cores[c]) base[v] = static_cast<CommunityId>(c);
    }
    const std::size_t k = cores.size();
    for (std::size_t code = 0; code < k * k * k; ++code) {
      base[7] = static_cast<CommunityId>(code % k);
      base[8] = static_cast<CommunityId>(code / k % k);
      base[9] = static_cast<CommunityId>(code / k / k);
      best = std::max(best, oracle::modularity(g, base));
    }
    EXPECT_NEAR(oracle::modularity(g, p.assignment()), best, 1e-12);
  }
}

TEST(ClampedAssign, DegenerateInputs) {
  const Graph g = make(3, {{0, 1}, {1, 2}});
  SolverSettings solver;
  EXPECT_THROW(clamped_modularity_assign(g, {}, std::vector<NodeId>{0, 1, 2}, solver),
               DegenerateOutcome);
  const Partition single = clamped_modularity_assign(g, {{0}}, std::vector<NodeId>{1, 2}, solver);
  EXPECT_EQ(single.assignment(), (std::vector<CommunityId>{0, 0, 0}));
  const Graph empty = make(3, {});
  const Partition flat = clamped_modularity_assign(empty, {{0}, {1}}, std::vector<NodeId>{2}, solver);
  EXPECT_EQ(flat.community(2), 0u);
}

TEST(ClampedAssign, RepairsRowsThatAreNotOneHot) {
  // A tiny penalty and a near-zero temperature leave the annealer free to
  // switch rows off; the result must still be a full partition.
  const Graph g = bowtie_with_hub();
  SolverSettings solver;
  solver.sweeps = 5;
  solver.restarts = 1;
  solver.seed = 3;
  ClampedStats stats;
  const Partition p =
      clamped_modularity_assign(g, {{0, 1, 2}, {4, 5, 6}}, std::vector<NodeId>{3}, solver, 1e-6, &stats);
  EXPECT_EQ(p.size(), 7u);
  EXPECT_LT(p.community(3), 2u);
}

TEST(SolverNames, RoundTrip) {
  EXPECT_EQ(parse_solver("anneal"), SolverKind::Anneal);
  EXPECT_EQ(parse_solver(to_string(SolverKind::Exhaustive)), SolverKind::Exhaustive);
  EXPECT_EQ(parse_assign(to_string(AssignMethod::Clamped)), AssignMethod::Clamped);
  EXPECT_THROW(parse_solver("tabu"), InvalidArgument);
  EXPECT_THROW(parse_assign("louvain"), InvalidArgument);
}

TEST(SolverSettings, ScheduleNeverInverts) {
  const QuboProblem tiny = QuboBuilder(1).add_linear(0, -1e-6).build();
  SolverSettings s;
  EXPECT_GE(s.schedule_for(tiny).initial_temp, s.final_temp);
  s.initial_temp = 1e-6;
  EXPECT_THROW(s.schedule_for(tiny), InvalidArgument);
}

TEST(Detect, PerfectEstimatorOnBowtie) {
  const Graph g = bowtie_with_hub();
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 1, 1, 1});
  DetectionConfig cfg;
  cfg.scoring.estimator = EstimatorKind::Perfect;
  cfg.solver.kind = SolverKind::Exhaustive;
  const DetectionOutput out = detect(g, cfg, &truth);
  // Either endpoint of the cross edge 3-4 is a minimum separation set; the
  // lowest code keeps node 3 and drops 4.
  EXPECT_EQ(out.sep_set, (std::vector<NodeId>{4}));
  EXPECT_EQ(out.stats.penalty, 0);
  EXPECT_EQ(out.stats.is_valid, true);
  EXPECT_EQ(out.stats.qubo_vars, 7u);
  EXPECT_EQ(out.stats.qubo_quadratic_terms, 1u);
  EXPECT_EQ(out.stats.num_communities, 2u);
  EXPECT_EQ(out.partition, truth);
}

TEST(Detect, NuEstimatorRecoversEasySbm) {
  SbmConfig sc;
  sc.n = 60;
  sc.k = 3;
  sc.p_intra = 0.7;
  sc.seed = 5;
  const SbmGraph sbm = generate_sbm(sc);
  DetectionConfig cfg;
  cfg.solver.sweeps = 200;
  cfg.solver.restarts = 4;
  const DetectionOutput out = detect(sbm.graph, cfg, &sbm.truth);
  EXPECT_GE(nmi(out.partition, sbm.truth), 0.9);
  EXPECT_EQ(out.method, "greedy");
  std::ostringstream json_text;
  write_detection_json(json_text, out, cfg);
  const auto doc = nlohmann::json::parse(json_text.str());
  EXPECT_EQ(doc["partition"].size(), 60u);
  EXPECT_EQ(doc["config"]["temp0"], "auto");
  EXPECT_EQ(doc["stats"]["sep_size"], out.sep_set.size());
}

TEST(Detect, RejectsBadInput) {
  const Graph g = make(2, {{0, 1}});
  DetectionConfig cfg;
  cfg.scoring.estimator = EstimatorKind::Perfect;
  cfg.solver.kind = SolverKind::Exhaustive;
  EXPECT_THROW(detect(Graph{}, cfg, nullptr), InvalidArgument);
  EXPECT_THROW(detect(g, cfg, nullptr), InvalidArgument);
  const Partition short_truth(std::vector<CommunityId>{0});
  EXPECT_THROW(detect(g, cfg, &short_truth), InvalidArgument);
}

TEST(Detect, SeparationOptimaAreValidAndMinimal) {
  // Valid separation sets under perfect labels, of minimum size.
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 5 + rng() % 6;
    const Graph g = oracle::random_graph(n, 0.4, rng);
    const auto labels = oracle::random_labels(n, 2, rng);
    const Partition truth(labels);
    DetectionConfig cfg;
    cfg.scoring.estimator = EstimatorKind::Perfect;
    cfg.solver.kind = SolverKind::Exhaustive;
    // Keeping any single node is valid, so the outcome is never degenerate.
    const DetectionOutput out = detect(g, cfg, &truth);
    EXPECT_EQ(out.stats.is_valid, true);
    EXPECT_EQ(out.sep_set.size(), oracle::min_separation_size(g, labels));
  }
}

TEST(ValidateSeparationSet, EverythingRemoved) {
  const Graph g = make(3, {{0, 1}, {1, 2}, {0, 2}});
  const Partition truth(std::vector<CommunityId>{0, 0, 1});
  const SeparationResult r = validate_separation_set(g, truth, std::vector<NodeId>{0, 1, 2});
  EXPECT_TRUE(r.is_valid);
  EXPECT_TRUE(r.is_injective);
  EXPECT_FALSE(r.is_surjective);
  EXPECT_TRUE(r.cores.empty());
}

TEST(ValidateSeparationSet, TriangleWithOneOutsider) {
  const Graph g = make(3, {{0, 1}, {1, 2}, {0, 2}});
  const Partition truth(std::vector<CommunityId>{0, 0, 1});
  const SeparationResult cut = validate_separation_set(g, truth, std::vector<NodeId>{2});
  EXPECT_TRUE(cut.is_valid);
  EXPECT_TRUE(cut.is_injective);
  // Community 1 has no core left.
  EXPECT_FALSE(cut.is_surjective);
  EXPECT_FALSE(validate_separation_set(g, truth, {}).is_valid);
}

// Middle community {3} touches both triangles. Dropping node 3 is the
// smallest valid set, but a surjective one must drop 2 and 4 instead.
TEST(Detect, SurjectivityCounterexampleIsFlagged) {
  const Graph g = make(7, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}});
  const std::vector<CommunityId> labels{0, 0, 0, 1, 2, 2, 2};
  const Partition truth(labels);
  std::size_t min_valid = g.num_nodes(), min_surjective = g.num_nodes();
  for (std::uint64_t mask = 0; mask < 128; ++mask) {
    BitVector x(7);
    for (std::size_t i = 0; i < 7; ++i) x[i] = static_cast<std::uint8_t>(mask >> i & 1U);
    const SeparationResult r = validate_separation_set(g, truth, flagged_nodes(x));
    const std::size_t size = r.sep_set.size();
    if (r.is_valid) min_valid = std::min(min_valid, size);
    if (r.is_valid && r.is_surjective) min_surjective = std::min(min_surjective, size);
  }
  EXPECT_EQ(min_valid, 1u);
  EXPECT_EQ(min_surjective, 2u);

  DetectionConfig cfg;
  cfg.scoring.estimator = EstimatorKind::Perfect;
  cfg.solver.kind = SolverKind::Exhaustive;
  const DetectionOutput out = detect(g, cfg, &truth);
  EXPECT_EQ(out.sep_set, (std::vector<NodeId>{3}));
  EXPECT_EQ(out.stats.is_valid, true);
  EXPECT_EQ(out.stats.is_surjective, false);
}

TEST(Detect, TwoCliquesWithNu) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < 5; ++i) {
    for (NodeId j = i + 1; j < 5; ++j) {
      e.push_back({i, j});
      e.push_back({static_cast<NodeId>(i + 5), static_cast<NodeId>(j + 5)});
    }
  }
  e.push_back({4, 5});
  const Graph g = make(10, e);
  const Partition truth(std::vector<CommunityId>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  DetectionConfig cfg;
  cfg.solver.kind = SolverKind::Exhaustive;
  const DetectionOutput out = detect(g, cfg, &truth);
  EXPECT_EQ(out.partition, truth);
  // Brute-force best two-way split is the same.
  double best = -1.0;
  for (std::uint64_t mask = 1; mask + 1 < 1024; ++mask) {
    std::vector<CommunityId> c(10);
    for (std::size_t i = 0; i < 10; ++i) c[i] = static_cast<CommunityId>(mask >> i & 1U);
    best = std::max(best, oracle::modularity(g, c));
  }
  EXPECT_NEAR(modularity(g, out.partition), best, 1e-12);
}

TEST(Detect, SingleCommunityTruthKeepsEverything) {
  const Graph g = make(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const Partition truth(std::vector<CommunityId>(4, 0));
  DetectionConfig cfg;
  cfg.scoring.estimator = EstimatorKind::Perfect;
  const DetectionOutput out = detect(g, cfg, &truth);
  EXPECT_TRUE(out.sep_set.empty());
  EXPECT_EQ(out.partition.num_communities(), 1u);
}

TEST(Detect, DeterministicForFixedSeed) {
  SbmConfig sc;
  sc.n = 45;
  sc.k = 3;
  sc.p_intra = 0.5;
  sc.seed = 2;
  const SbmGraph sbm = generate_sbm(sc);
  for (AssignMethod method : {AssignMethod::Greedy, AssignMethod::Clamped}) {
    DetectionConfig cfg;
    cfg.assign = method;
    cfg.solver.sweeps = 100;
    cfg.solver.restarts = 3;
    cfg.solver.seed = 9;
    const DetectionOutput a = detect(sbm.graph, cfg);
    cfg.solver.jobs = 2;
    cfg.scoring.jobs = 2;
    const DetectionOutput b = detect(sbm.graph, cfg);
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_EQ(a.sep_set, b.sep_set);
    // Cores keep their own community.
    for (const auto& core : a.cores) {
      for (NodeId v : core) EXPECT_EQ(a.partition.community(v), a.partition.community(core.front()));
    }
  }
}

TEST(SeparationEnergy, OneMoreFlagHelpsWhilePenaltyRemains) {
  // Whenever P(x) > 0, flagging one endpoint of a kept separation edge lowers
  // the energy by at least one.
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 6 + rng() % 15;
    const Graph g = oracle::random_graph(n, 0.3, rng);
    const Partition truth(oracle::random_labels(n, 3, rng));
    const EdgeScoreMap labels = perfect_estimator(g, truth);
    const QuboProblem q = build_separation_qubo(g, labels);
    for (int sample = 0; sample < 50; ++sample) {
      BitVector x(n);
      long long kept = 0;
      for (auto& b : x) kept += b = static_cast<std::uint8_t>(rng() % 2);
      const long long p = separation_penalty(g, labels, x);
      ASSERT_EQ(q.energy(x), static_cast<double>(2 * p - kept));
      if (p == 0) continue;
      double best_drop = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        BitVector y = x;
        y[i] = 0;
        best_drop = std::max(best_drop, q.energy(x) - q.energy(y));
      }
      ASSERT_GE(best_drop, 1.0);
    }
  }
}

}  // namespace
}  // namespace sepcd
