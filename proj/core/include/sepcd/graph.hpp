#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sepcd/types.hpp"

namespace sepcd {

// Undirected edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable simple undirected graph in CSR form. Nodes are 0..n-1, neighbor
// lists are sorted, edges are indexed in lexicographic (u, v) order.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an edge list. Duplicates and reversed duplicates
  // collapse to one edge. Throws InvalidArgument on self-loops or ids >= n.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  static Graph complete(std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }
  std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(NodeId a, NodeId b) const;
  // Position of {a, b} in edges(), if present.
  std::optional<std::size_t> edge_index(NodeId a, NodeId b) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<Edge> edges_;
};

// Total assignment node -> community with dense ids 0..k-1, each id used.
class Partition {
 public:
  Partition() = default;

  // `assignment` must already be dense; throws InvalidArgument otherwise.
  explicit Partition(std::vector<CommunityId> assignment);

  // Remaps arbitrary labels to dense ids in ascending label order.
  static Partition from_labels(std::span<const std::int64_t> labels);

  std::size_t size() const noexcept { return assignment_.size(); }
  std::size_t num_communities() const noexcept { return num_communities_; }
  CommunityId community(NodeId node) const { return assignment_[node]; }
  bool same_community(NodeId a, NodeId b) const { return assignment_[a] == assignment_[b]; }
  const std::vector<CommunityId>& assignment() const noexcept { return assignment_; }

  // Members of every community, each list sorted.
  std::vector<std::vector<NodeId>> groups() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<CommunityId> assignment_;
  std::size_t num_communities_ = 0;
};

// layers[r] holds the nodes at shortest-path distance exactly r from source.
struct NeighborhoodLayers {
  NodeId source = 0;
  std::vector<std::vector<NodeId>> layers;
};

// Connected components of the subgraph induced by `retained` (a per-node
// mask). Components are sorted internally and ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const Graph& graph,
                                                      const std::vector<bool>& retained);
std::vector<std::vector<NodeId>> connected_components(const Graph& graph,
                                                      std::span<const NodeId> retained);

// BFS layers up to radius max_radius; stops early once the component is
// exhausted, so layers.size() may be smaller than max_radius + 1.
NeighborhoodLayers bfs_layers(const Graph& graph, NodeId source, std::size_t max_radius);

}  // namespace sepcd
