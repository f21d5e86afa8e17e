#include "sepcd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / total) * std::log(c / total);
  }
  return h;
}

std::vector<double> community_sizes(const Partition& p) {
  std::vector<double> sizes(p.num_communities(), 0.0);
  for (CommunityId c : p.assignment()) sizes[c] += 1.0;
  return sizes;
}

}  // namespace

double modularity(const Graph& graph, const Partition& partition) {
  if (partition.size() != graph.num_nodes()) throw InvalidArgument("partition does not cover graph");
  if (graph.num_edges() == 0) throw InvalidArgument("modularity undefined on an edgeless graph");
  const double m = static_cast<double>(graph.num_edges());
  std::vector<double> internal(partition.num_communities(), 0.0);
  std::vector<double> degree(partition.num_communities(), 0.0);
  for (const Edge& e : graph.edges()) {
    if (partition.same_community(e.u, e.v)) internal[partition.community(e.u)] += 1.0;
  }
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    degree[partition.community(i)] += static_cast<double>(graph.degree(i));
  }
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    q += internal[c] / m - (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
  }
  return q;
}

double nmi(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw InvalidArgument("partitions cover different node counts");
  if (a.size() == 0) throw InvalidArgument("nmi of empty partitions");
  const double n = static_cast<double>(a.size());
  const auto size_a = community_sizes(a);
  const auto size_b = community_sizes(b);
  const double h_a = entropy(size_a, n);
  const double h_b = entropy(size_b, n);
  if (h_a == 0.0 && h_b == 0.0) return 1.0;

  std::map<std::pair<CommunityId, CommunityId>, double> joint;
  for (NodeId i = 0; i < a.size(); ++i) joint[{a.community(i), b.community(i)}] += 1.0;
  double mutual = 0.0;
  for (const auto& [key, count] : joint) {
    mutual += (count / n) * std::log(n * count / (size_a[key.first] * size_b[key.second]));
  }
  return std::clamp(mutual / ((h_a + h_b) / 2.0), 0.0, 1.0);
}

double size_deviation(std::size_t found, std::size_t best_known) {
  if (best_known == 0) throw InvalidArgument("best-known separation set is empty");
  return static_cast<double>(found) / static_cast<double>(best_known);
}

double size_deviation(std::span<const NodeId> found, std::span<const NodeId> best_known) {
  return size_deviation(found.size(), best_known.size());
}

}  // namespace sepcd
