#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sepcd/error.hpp"
#include "sepcd/metrics.hpp"

namespace sepcd {
namespace {

TEST(Modularity, TwoTrianglesJoinedByEdge) {
  const Graph g = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
  const Partition split(std::vector<CommunityId>{0, 0, 0, 1, 1, 1});
  // Each side: 3 internal edges, degree 7; 2 * (3/7 - (7/14)^2).
  EXPECT_NEAR(modularity(g, split), 2.0 * (3.0 / 7.0 - 0.25), 1e-15);
  const Partition one(std::vector<CommunityId>(6, 0));
  EXPECT_NEAR(modularity(g, one), 0.0, 1e-15);
}

TEST(Modularity, MatchesDoubleSumOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 29;
    const Graph g = oracle::random_graph(n, 0.2, rng);
    if (g.num_edges() == 0) continue;
    const auto labels = oracle::random_labels(n, 1 + rng() % std::min<std::size_t>(n, 5), rng);
    EXPECT_NEAR(modularity(g, Partition(labels)), oracle::modularity(g, labels), 1e-12);
  }
}

TEST(Modularity, RejectsBadInput) {
  const Graph g = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
  EXPECT_THROW(modularity(g, Partition(std::vector<CommunityId>{0})), InvalidArgument);
  EXPECT_THROW(modularity(Graph::from_edges(2, std::vector<Edge>{}), Partition(std::vector<CommunityId>{0, 0})),
               InvalidArgument);
}

TEST(Nmi, MatchesOracleAndProperties) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const auto a = oracle::random_labels(n, 1 + rng() % std::min<std::size_t>(n, 6), rng);
    const auto b = oracle::random_labels(n, 1 + rng() % std::min<std::size_t>(n, 6), rng);
    const Partition pa(a), pb(b);
    const double v = nmi(pa, pb);
    // The base of the logarithm cancels in the ratio.
    EXPECT_NEAR(v, std::clamp(oracle::nmi(a, b), 0.0, 1.0), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, nmi(pb, pa), 1e-12);
    EXPECT_NEAR(nmi(pa, pa), 1.0, 1e-12);
    // Renaming communities leaves the score unchanged.
    std::vector<CommunityId> perm(pa.num_communities());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<CommunityId> renamed(n);
    for (std::size_t i = 0; i < n; ++i) renamed[i] = perm[a[i]];
    EXPECT_NEAR(nmi(Partition(renamed), pb), v, 1e-12);
  }
}

TEST(Nmi, SingleCommunityConventions) {
  const Partition one(std::vector<CommunityId>{0, 0, 0, 0});
  const Partition two(std::vector<CommunityId>{0, 0, 1, 1});
  EXPECT_EQ(nmi(one, one), 1.0);
  EXPECT_EQ(nmi(one, two), 0.0);
  EXPECT_THROW(nmi(one, Partition(std::vector<CommunityId>{0})), InvalidArgument);
}

TEST(Nmi, IndependentSplitsScoreZero) {
  const Partition a(std::vector<CommunityId>{0, 0, 1, 1});
  const Partition b(std::vector<CommunityId>{0, 1, 0, 1});
  EXPECT_NEAR(nmi(a, b), 0.0, 1e-15);
}

TEST(SizeDeviation, Ratio) {
  EXPECT_EQ(size_deviation(6, 4), 1.5);
  const std::vector<NodeId> found{1, 2}, best{3, 4, 5, 6};
  EXPECT_EQ(size_deviation(found, best), 0.5);
  EXPECT_THROW(size_deviation(3, 0), InvalidArgument);
}

}  // namespace
}  // namespace sepcd
