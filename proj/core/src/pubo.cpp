#include "sepcd/pubo.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

void check_assignment(const Graph& graph, const Partition& truth, std::span<const std::uint8_t> x) {
  if (truth.size() != graph.num_nodes()) throw InvalidArgument("ground truth does not cover graph");
  if (x.size() != graph.num_nodes()) throw InvalidArgument("assignment length does not match graph");
}

void check_pair(const Graph& graph, const Partition& truth, NodeId u, NodeId v) {
  if (graph.num_nodes() > kMaxPathEnumerationNodes) {
    throw InvalidArgument("path enumeration limited to " +
                          std::to_string(kMaxPathEnumerationNodes) + " nodes");
  }
  if (truth.size() != graph.num_nodes()) throw InvalidArgument("ground truth does not cover graph");
  if (u >= graph.num_nodes() || v >= graph.num_nodes()) throw InvalidArgument("node out of range");
  if (u == v) throw InvalidArgument("injectivity term needs two distinct nodes");
  if (!truth.same_community(u, v)) throw InvalidArgument("nodes belong to different communities");
}

// Calls visit(path) for every simple path u -> v whose nodes all lie in the
// community of u.
template <typename Visit>
void for_each_intra_path(const Graph& graph, const Partition& truth, NodeId u, NodeId v,
                         Visit&& visit) {
  const CommunityId c = truth.community(u);
  std::vector<NodeId> path{u};
  std::vector<bool> on_path(graph.num_nodes(), false);
  on_path[u] = true;
  auto extend = [&](auto& self, NodeId at) -> void {
    for (NodeId next : graph.neighbors(at)) {
      if (on_path[next] || truth.community(next) != c) continue;
      path.push_back(next);
      if (next == v) {
        visit(path);
      } else {
        on_path[next] = true;
        self(self, next);
        on_path[next] = false;
      }
      path.pop_back();
    }
  };
  extend(extend, u);
}

Pubo multiply(const Pubo& a, const Pubo& b) {
  Pubo out;
  out.reserve(a.size() * b.size());
  for (const auto& s : a) {
    for (const auto& t : b) {
      PuboTerm p;
      p.coefficient = s.coefficient * t.coefficient;
      std::set_union(s.vars.begin(), s.vars.end(), t.vars.begin(), t.vars.end(),
                     std::back_inserter(p.vars));
      out.push_back(std::move(p));
    }
  }
  return canonicalize(out);
}

}  // namespace

Pubo canonicalize(const Pubo& terms) {
  std::map<std::vector<VarIndex>, double> merged;
  for (const auto& t : terms) {
    auto vars = t.vars;
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    merged[std::move(vars)] += t.coefficient;
  }
  Pubo out;
  for (auto& [vars, c] : merged) {
    if (c != 0.0) out.push_back({c, vars});
  }
  return out;
}

double evaluate_pubo(const Pubo& terms, std::span<const std::uint8_t> x) {
  double total = 0.0;
  for (const auto& t : terms) {
    bool all = true;
    for (VarIndex v : t.vars) {
      if (v >= x.size()) throw InvalidArgument("assignment too short for PUBO");
      all = all && x[v];
    }
    if (all) total += t.coefficient;
  }
  return total;
}

std::size_t pubo_num_vars(const Pubo& terms) {
  std::size_t n = 0;
  for (const auto& t : terms) {
    for (VarIndex v : t.vars) n = std::max<std::size_t>(n, v + std::size_t{1});
  }
  return n;
}

long long surjectivity_term(const Graph& graph, const Partition& truth,
                            std::span<const std::uint8_t> x, NodeId node) {
  check_assignment(graph, truth, x);
  long long count = 0;
  for (NodeId j = 0; j < graph.num_nodes(); ++j) {
    if (truth.same_community(node, j) && x[j]) ++count;
  }
  return count;
}

Pubo surjectivity_polynomial(const Partition& truth, NodeId node) {
  Pubo out;
  for (NodeId j = 0; j < truth.size(); ++j) {
    if (truth.same_community(node, j)) out.push_back({1.0, {j}});
  }
  return out;
}

long long injectivity_term(const Graph& graph, const Partition& truth,
                           std::span<const std::uint8_t> x, NodeId u, NodeId v) {
  check_pair(graph, truth, u, v);
  check_assignment(graph, truth, x);
  long long count = 0;
  for_each_intra_path(graph, truth, u, v, [&](const std::vector<NodeId>& path) {
    if (std::all_of(path.begin(), path.end(), [&](NodeId p) { return x[p] != 0; })) ++count;
  });
  return count;
}

Pubo injectivity_polynomial(const Graph& graph, const Partition& truth, NodeId u, NodeId v) {
  check_pair(graph, truth, u, v);
  Pubo out;
  for_each_intra_path(graph, truth, u, v, [&](const std::vector<NodeId>& path) {
    out.push_back({1.0, std::vector<VarIndex>(path.begin(), path.end())});
  });
  return canonicalize(out);
}

ThresholdPenalty threshold_penalty(const Pubo& f, long long m_bound, VarIndex ancilla_offset) {
  if (m_bound < 1) throw InvalidArgument("m_bound must be at least 1");
  std::size_t bits = 0;  // ceil(log2(m_bound))
  while ((1LL << bits) < m_bound) ++bits;
  ThresholdPenalty out;
  out.num_ancillas = bits + 1;

  // f(x) - sum_i 2^i y_i, then squared.
  Pubo difference = f;
  for (std::size_t i = 0; i < out.num_ancillas; ++i) {
    difference.push_back({-static_cast<double>(1LL << i),
                          {ancilla_offset + static_cast<VarIndex>(i)}});
  }
  difference = canonicalize(difference);
  out.match = multiply(difference, difference);

  Pubo product{{1.0, {}}};
  for (std::size_t i = 0; i < out.num_ancillas; ++i) {
    product = multiply(product, Pubo{{1.0, {}}, {-1.0, {ancilla_offset + static_cast<VarIndex>(i)}}});
  }
  out.nonzero = std::move(product);
  return out;
}

}  // namespace sepcd
