#include "sepcd/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// BFS distances from both endpoints of one edge, bounded by a depth. Buffers
// are sized to the graph once and reset through the touched list, so one
// workspace can score many edges.
class EdgeNeighborhood {
 public:
  explicit EdgeNeighborhood(const Graph& graph)
      : graph_(graph),
        du_(graph.num_nodes(), kUnreached),
        dv_(graph.num_nodes(), kUnreached) {}

  void compute(NodeId u, NodeId v, std::uint32_t depth) {
    for (NodeId x : touched_) {
      du_[x] = kUnreached;
      dv_[x] = kUnreached;
    }
    touched_.clear();
    bfs(u, depth, du_);
    bfs(v, depth, dv_);
  }

  ConnectivityTerm term(std::uint32_t r, int path_length) const {
    const double two_m = 2.0 * static_cast<double>(graph_.num_edges());
    ConnectivityTerm t;
    if (two_m == 0.0) return t;

    auto in_x = [&](NodeId x) { return du_[x] == r && dv_[x] > r; };
    auto in_y = [&](NodeId y) { return dv_[y] == r && du_[y] > r; };

    double size_x = 0.0, size_y = 0.0, degree_x = 0.0, degree_y = 0.0;
    for (NodeId x : touched_) {
      if (in_x(x)) {
        size_x += 1.0;
        degree_x += static_cast<double>(graph_.degree(x));
      } else if (in_y(x)) {
        size_y += 1.0;
        degree_y += static_cast<double>(graph_.degree(x));
      }
    }

    if (path_length == 1) {
      t.normalizer = size_x * size_y;
      if (t.normalizer == 0.0) return t;
      std::size_t count = 0;
      for (NodeId x : touched_) {
        if (!in_x(x)) continue;
        for (NodeId y : graph_.neighbors(x)) count += in_y(y) ? 1 : 0;
      }
      t.observed = static_cast<double>(count);
      t.expected = std::min(t.normalizer, degree_x * degree_y / two_m);
      return t;
    }

    double size_w = 0.0;
    double expected = 0.0;
    std::size_t count = 0;
    for (NodeId w : touched_) {
      if (du_[w] <= r || dv_[w] <= r || std::min(du_[w], dv_[w]) != r + 1) continue;
      size_w += 1.0;
      const double dw = static_cast<double>(graph_.degree(w));
      expected += 2.0 * (dw * degree_x / two_m) * (dw * degree_y / two_m);
      std::size_t from_x = 0, from_y = 0;
      for (NodeId z : graph_.neighbors(w)) {
        from_x += in_x(z) ? 1 : 0;
        from_y += in_y(z) ? 1 : 0;
      }
      if (from_x > 0 && from_y > 0) count += from_x + from_y;
    }
    t.normalizer = size_w * (size_x + size_y);
    if (t.normalizer == 0.0) return t;
    t.observed = static_cast<double>(count);
    t.expected = std::min(t.normalizer, expected);
    return t;
  }

  double combine(const ConnectivityWeights& weights) const {
    double nu = 0.0;
    for (std::size_t r = 0; r < weights.length1.size(); ++r) {
      if (weights.length1[r] > 0.0) {
        nu += weights.length1[r] * term(static_cast<std::uint32_t>(r), 1).value();
      }
    }
    for (std::size_t r = 0; r < weights.length2.size(); ++r) {
      if (weights.length2[r] > 0.0) {
        nu += weights.length2[r] * term(static_cast<std::uint32_t>(r), 2).value();
      }
    }
    return nu;
  }

 private:
  void bfs(NodeId source, std::uint32_t depth, std::vector<std::uint32_t>& dist) {
    frontier_.assign(1, source);
    mark(source, 0, dist);
    for (std::uint32_t d = 1; d <= depth && !frontier_.empty(); ++d) {
      next_.clear();
      for (NodeId x : frontier_) {
        for (NodeId y : graph_.neighbors(x)) {
          if (dist[y] == kUnreached) {
            mark(y, d, dist);
            next_.push_back(y);
          }
        }
      }
      frontier_.swap(next_);
    }
  }

  void mark(NodeId x, std::uint32_t d, std::vector<std::uint32_t>& dist) {
    if (du_[x] == kUnreached && dv_[x] == kUnreached) touched_.push_back(x);
    dist[x] = d;
  }

  const Graph& graph_;
  std::vector<std::uint32_t> du_;
  std::vector<std::uint32_t> dv_;
  std::vector<NodeId> touched_;
  std::vector<NodeId> frontier_;
  std::vector<NodeId> next_;
};

void require_edge(const Graph& graph, NodeId u, NodeId v) {
  if (!graph.has_edge(u, v)) {
    throw InvalidArgument("(" + std::to_string(u) + ", " + std::to_string(v) +
                          ") is not an edge of the graph");
  }
}

EdgeScoreMap finish(const std::string& name, std::vector<double> scores, double threshold) {
  EdgeScoreMap out;
  out.estimator = name;
  out.threshold = threshold;
  out.labels.reserve(scores.size());
  for (double s : scores) out.labels.push_back(s < threshold ? 1 : 0);
  out.scores = std::move(scores);
  return out;
}

std::vector<double> parse_weight_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto piece = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    std::string token(piece);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("malformed weight '" + token + "'");
    }
    if (used != token.size()) throw InvalidArgument("malformed weight '" + token + "'");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Perfect: return "perfect";
    case EstimatorKind::Modularity: return "modularity";
    case EstimatorKind::NeighborhoodConnectivity: return "nu";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "perfect") return EstimatorKind::Perfect;
  if (name == "modularity") return EstimatorKind::Modularity;
  if (name == "nu") return EstimatorKind::NeighborhoodConnectivity;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

std::size_t EdgeScoreMap::num_separation_edges() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

void ConnectivityWeights::validate() const {
  if (length1.size() != length2.size() + 1) {
    throw InvalidArgument("need d+1 direct-edge weights and d two-hop weights");
  }
  if (length1.empty()) throw InvalidArgument("empty weight vector");
  double sum = 0.0;
  for (double w : length1) {
    if (!(w >= 0.0)) throw InvalidArgument("weights must be non-negative");
    sum += w;
  }
  for (double w : length2) {
    if (!(w >= 0.0)) throw InvalidArgument("weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("weights must sum to 1");
  if (length1[0] != 0.0) throw InvalidArgument("the radius-0 direct-edge weight must be 0");
}

ConnectivityWeights ConnectivityWeights::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("weights must look like 'w1_0,...,w1_d:w2_0,...,w2_{d-1}'");
  }
  ConnectivityWeights w;
  w.length1 = parse_weight_list(text.substr(0, colon));
  w.length2 = parse_weight_list(text.substr(colon + 1));
  w.validate();
  return w;
}

std::string ConnectivityWeights::to_string() const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < length1.size(); ++i) out << (i ? "," : "") << length1[i];
  out << ':';
  for (std::size_t i = 0; i < length2.size(); ++i) out << (i ? "," : "") << length2[i];
  return out.str();
}

ConnectivityTerm connectivity_term(const Graph& graph, NodeId u, NodeId v, std::size_t radius,
                                   int path_length) {
  require_edge(graph, u, v);
  if (path_length != 1 && path_length != 2) {
    throw InvalidArgument("path length must be 1 or 2");
  }
  if (u > v) std::swap(u, v);  // bitwise symmetric results
  EdgeNeighborhood hood(graph);
  hood.compute(u, v, static_cast<std::uint32_t>(radius + 1));
  return hood.term(static_cast<std::uint32_t>(radius), path_length);
}

double neighborhood_connectivity(const Graph& graph, NodeId u, NodeId v,
                                 const ConnectivityWeights& weights) {
  weights.validate();
  require_edge(graph, u, v);
  if (u > v) std::swap(u, v);
  EdgeNeighborhood hood(graph);
  hood.compute(u, v, static_cast<std::uint32_t>(weights.radius() + 1));
  return hood.combine(weights);
}

double modularity_matrix_entry(const Graph& graph, NodeId u, NodeId v) {
  if (u >= graph.num_nodes() || v >= graph.num_nodes()) {
    throw InvalidArgument("node out of range");
  }
  const double m = static_cast<double>(graph.num_edges());
  if (m == 0.0) throw InvalidArgument("modularity matrix undefined on an edgeless graph");
  const double a = graph.has_edge(u, v) ? 1.0 : 0.0;
  const double expected =
      static_cast<double>(graph.degree(u)) * static_cast<double>(graph.degree(v)) / (2.0 * m);
  return (a - expected) / m;
}

EdgeScoreMap perfect_estimator(const Graph& graph, const Partition& truth) {
  if (truth.size() != graph.num_nodes()) {
    throw InvalidArgument("ground truth does not cover the graph");
  }
  std::vector<double> scores;
  scores.reserve(graph.num_edges());
  for (const Edge& e : graph.edges()) scores.push_back(truth.same_community(e.u, e.v) ? 1.0 : -1.0);
  return finish("perfect", std::move(scores), 0.0);
}

EdgeScoreMap score_all_edges(const Graph& graph, const ScoreOptions& options,
                             const Partition* truth) {
  switch (options.estimator) {
    case EstimatorKind::Perfect: {
      if (truth == nullptr) throw InvalidArgument("perfect estimator requires ground truth");
      EdgeScoreMap out = perfect_estimator(graph, *truth);
      return finish(out.estimator, std::move(out.scores), options.threshold);
    }
    case EstimatorKind::Modularity: {
      std::vector<double> scores;
      scores.reserve(graph.num_edges());
      for (const Edge& e : graph.edges()) scores.push_back(modularity_matrix_entry(graph, e.u, e.v));
      return finish("modularity", std::move(scores), options.threshold);
    }
    case EstimatorKind::NeighborhoodConnectivity: break;
  }

  options.weights.validate();
  const auto& edges = graph.edges();
  std::vector<double> scores(edges.size(), 0.0);
  const auto depth = static_cast<std::uint32_t>(options.weights.radius() + 1);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    EdgeNeighborhood hood(graph);
    for (std::size_t i = begin; i < end; ++i) {
      hood.compute(edges[i].u, edges[i].v, depth);
      scores[i] = hood.combine(options.weights);
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, edges.size()));
  if (jobs == 1) {
    score_range(0, edges.size());
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (edges.size() + jobs - 1) / jobs;
    for (std::size_t begin = 0; begin < edges.size(); begin += chunk) {
      workers.emplace_back(score_range, begin, std::min(edges.size(), begin + chunk));
    }
  }
  return finish("nu", std::move(scores), options.threshold);
}

std::optional<double> r_squared(const EdgeScoreMap& scores, const Partition& truth,
                                const Graph& graph) {
  const auto& edges = graph.edges();
  if (edges.empty()) throw InvalidArgument("R^2 undefined without edges");
  if (scores.scores.size() != edges.size()) throw InvalidArgument("score map does not match graph");
  if (truth.size() != graph.num_nodes()) throw InvalidArgument("ground truth does not cover graph");

  double mean = 0.0;
  for (const Edge& e : edges) mean += truth.same_community(e.u, e.v) ? 1.0 : 0.0;
  mean /= static_cast<double>(edges.size());

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double y = truth.same_community(edges[i].u, edges[i].v) ? 1.0 : 0.0;
    const double prediction = (scores.scores[i] + 1.0) / 2.0;
    ss_res += (y - prediction) * (y - prediction);
    ss_tot += (y - mean) * (y - mean);
  }
  if (ss_tot == 0.0) {
    if (ss_res == 0.0) return 1.0;
    return std::nullopt;
  }
  return 1.0 - ss_res / ss_tot;
}

void write_scores_csv(std::ostream& out, const Graph& graph, const EdgeScoreMap& scores) {
  if (scores.scores.size() != graph.num_edges()) throw InvalidArgument("score map does not match graph");
  out << "u,v,score,label\n";
  char buf[64];
  for (std::size_t i = 0; i < graph.num_edges(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", scores.scores[i]);
    out << graph.edges()[i].u << ',' << graph.edges()[i].v << ',' << buf << ','
        << static_cast<int>(scores.labels[i]) << '\n';
  }
}

}  // namespace sepcd
