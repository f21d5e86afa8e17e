#include "sepcd/graph.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "sepcd/error.hpp"

namespace sepcd {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) {
      throw InvalidArgument("self-loop on node " + std::to_string(e.u));
    }
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    normalized.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  std::sort(normalized.begin(), normalized.end());
  normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());

  Graph g;
  g.offsets_.assign(num_nodes + 1, 0);
  for (const Edge& e : normalized) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];

  g.adjacency_.resize(2 * normalized.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : normalized) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  g.edges_ = std::move(normalized);
  return g;
}

Graph Graph::complete(std::size_t num_nodes) {
  std::vector<Edge> edges;
  edges.reserve(num_nodes * (num_nodes > 0 ? num_nodes - 1 : 0) / 2);
  for (NodeId u = 0; u < num_nodes; ++u) {
    for (NodeId v = u + 1; v < num_nodes; ++v) edges.push_back({u, v});
  }
  return from_edges(num_nodes, edges);
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a >= num_nodes() || b >= num_nodes()) return false;
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::optional<std::size_t> Graph::edge_index(NodeId a, NodeId b) const {
  const Edge key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

Partition::Partition(std::vector<CommunityId> assignment) : assignment_(std::move(assignment)) {
  if (assignment_.empty()) return;
  const CommunityId max_id = *std::max_element(assignment_.begin(), assignment_.end());
  std::vector<bool> used(static_cast<std::size_t>(max_id) + 1, false);
  for (CommunityId c : assignment_) used[c] = true;
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw InvalidArgument("partition community ids are not dense");
  }
  num_communities_ = used.size();
}

Partition Partition::from_labels(std::span<const std::int64_t> labels) {
  std::map<std::int64_t, CommunityId> remap;
  for (std::int64_t label : labels) remap.emplace(label, 0);
  CommunityId next = 0;
  for (auto& [label, id] : remap) id = next++;
  std::vector<CommunityId> assignment;
  assignment.reserve(labels.size());
  for (std::int64_t label : labels) assignment.push_back(remap.at(label));
  return Partition(std::move(assignment));
}

std::vector<std::vector<NodeId>> Partition::groups() const {
  std::vector<std::vector<NodeId>> out(num_communities_);
  for (NodeId i = 0; i < assignment_.size(); ++i) out[assignment_[i]].push_back(i);
  return out;
}

std::vector<std::vector<NodeId>> connected_components(const Graph& graph,
                                                      const std::vector<bool>& retained) {
  const std::size_t n = graph.num_nodes();
  if (retained.size() != n) throw InvalidArgument("retained mask size does not match graph");
  std::vector<bool> seen(n, false);
  std::vector<std::vector<NodeId>> components;
  std::vector<NodeId> stack;
  for (NodeId start = 0; start < n; ++start) {
    if (!retained[start] || seen[start]) continue;
    std::vector<NodeId> comp;
    stack.push_back(start);
    seen[start] = true;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (NodeId y : graph.neighbors(x)) {
        if (retained[y] && !seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

std::vector<std::vector<NodeId>> connected_components(const Graph& graph,
                                                      std::span<const NodeId> retained) {
  std::vector<bool> mask(graph.num_nodes(), false);
  for (NodeId v : retained) {
    if (v >= graph.num_nodes()) throw InvalidArgument("retained node out of range");
    mask[v] = true;
  }
  return connected_components(graph, mask);
}

NeighborhoodLayers bfs_layers(const Graph& graph, NodeId source, std::size_t max_radius) {
  if (source >= graph.num_nodes()) {
    throw InvalidArgument("bfs source " + std::to_string(source) + " out of range");
  }
  NeighborhoodLayers out;
  out.source = source;
  out.layers.push_back({source});
  std::vector<bool> seen(graph.num_nodes(), false);
  seen[source] = true;
  for (std::size_t r = 1; r <= max_radius; ++r) {
    std::vector<NodeId> next;
    for (NodeId x : out.layers.back()) {
      for (NodeId y : graph.neighbors(x)) {
        if (!seen[y]) {
          seen[y] = true;
          next.push_back(y);
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    out.layers.push_back(std::move(next));
  }
  return out;
}

}  // namespace sepcd
