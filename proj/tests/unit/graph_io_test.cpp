#include <gtest/gtest.h>

#include <sstream>

#include "sepcd/error.hpp"
#include "sepcd/graph_io.hpp"

namespace sepcd {
namespace {

TEST(EdgeList, ReadsCommentsAndWhitespace) {
  std::istringstream in("# a comment\n0 1\n\n  1\t2  \n# trailing\n");
  const Graph g = read_edge_list(in);
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(EdgeList, RoundTripKeepsIsolatedTrailingNodes) {
  const std::vector<Edge> edges{{0, 1}};
  const Graph g = Graph::from_edges(4, edges);
  std::stringstream buf;
  write_edge_list(buf, g);
  EXPECT_EQ(read_edge_list(buf), g);
}

TEST(EdgeList, ReportsLineOfBadInput) {
  std::istringstream weighted("0 1\n1 2 0.5\n");
  try {
    read_edge_list(weighted);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream negative("0 -1\n");
  EXPECT_THROW(read_edge_list(negative), ParseError);
  std::istringstream junk("0 x\n");
  EXPECT_THROW(read_edge_list(junk), ParseError);
  std::istringstream loop("3 3\n");
  EXPECT_THROW(read_edge_list(loop), ParseError);
}

TEST(EdgeList, MissingFileIsAnError) {
  EXPECT_THROW(load_edge_list("/nonexistent/graph.txt"), Error);
}

TEST(PartitionFile, RoundTrip) {
  const Partition p(std::vector<CommunityId>{1, 0, 1, 2});
  std::stringstream buf;
  write_partition(buf, p);
  EXPECT_EQ(read_partition(buf, 4), p);
}

TEST(PartitionFile, RejectsMissingAndRepeatedNodes) {
  std::istringstream missing("0 0\n1 1\n");
  EXPECT_THROW(read_partition(missing, 3), ParseError);
  std::istringstream twice("0 0\n0 1\n1 1\n");
  EXPECT_THROW(read_partition(twice, 2), ParseError);
  std::istringstream range("0 0\n5 1\n");
  EXPECT_THROW(read_partition(range, 2), ParseError);
}

}  // namespace
}  // namespace sepcd
