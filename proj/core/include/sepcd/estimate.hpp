#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sepcd/graph.hpp"

namespace sepcd {

enum class EstimatorKind { Perfect, Modularity, NeighborhoodConnectivity };

std::string_view to_string(EstimatorKind kind);
// Accepts "perfect", "modularity" and "nu"; throws InvalidArgument otherwise.
EstimatorKind parse_estimator(std::string_view name);

// Per-edge separation estimates, indexed like Graph::edges().
// labels[e] == 1 marks a predicted separation-edge, i.e. scores[e] < threshold.
struct EdgeScoreMap {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  std::string estimator;
  double threshold = 0.0;

  std::size_t num_separation_edges() const;
};

// Weights of the neighborhood connectivity terms. length1[r] weighs the
// direct-edge term at radius r (r = 0..d), length2[r] the two-hop term at
// radius r (r = 0..d-1). All weights are non-negative, sum to one, and the
// radius-0 direct-edge weight is zero (that term is plain modularity).
struct ConnectivityWeights {
  std::vector<double> length1{0.0, 0.5};
  std::vector<double> length2{0.5};

  std::size_t radius() const noexcept { return length2.size(); }
  // Throws InvalidArgument if the invariants above do not hold.
  void validate() const;

  // "0,0.5:0.5" -> length1 = {0, 0.5}, length2 = {0.5}.
  static ConnectivityWeights parse(std::string_view text);
  std::string to_string() const;
};

// Observed count, configuration-model expectation and normalizer behind one
// nu term. value() is 0 when the normalizer vanishes.
struct ConnectivityTerm {
  double observed = 0.0;
  double expected = 0.0;
  double normalizer = 0.0;

  double value() const noexcept {
    return normalizer > 0.0 ? (observed - expected) / normalizer : 0.0;
  }
};

// Single nu_r^(l) term of edge (u, v), for path_length 1 or 2.
//
// With du, dv the BFS distances from u and v, the sets used at radius r are
//   X = {x : du(x) = r, dv(x) > r}     (r-layer of u, minus shared nodes)
//   Y = {y : dv(y) = r, du(y) > r}
//   W = {w : du(w) > r, dv(w) > r, min(du(w), dv(w)) = r + 1}
// Everything closer than r to either endpoint is excluded, as are nodes lying
// in both r-layers. Path length 1 counts edges between X and Y, normalized by
// |X||Y|. Path length 2 counts the unique edges on paths x - w - y, normalized
// by |X||W| + |W||Y|. Expectations use the configuration model
// d_i d_j / (2m) and are capped at the normalizer.
ConnectivityTerm connectivity_term(const Graph& graph, NodeId u, NodeId v, std::size_t radius,
                                   int path_length);

// Weighted combination of all terms. Result lies in [-1, 1] and is symmetric
// in (u, v). Throws InvalidArgument if (u, v) is not an edge.
double neighborhood_connectivity(const Graph& graph, NodeId u, NodeId v,
                                 const ConnectivityWeights& weights);

// (a_uv - d_u d_v / 2m) / m. Throws InvalidArgument on an edgeless graph.
double modularity_matrix_entry(const Graph& graph, NodeId u, NodeId v);

// Labels from ground truth; scores are +1 inside a community, -1 across.
EdgeScoreMap perfect_estimator(const Graph& graph, const Partition& truth);

struct ScoreOptions {
  EstimatorKind estimator = EstimatorKind::NeighborhoodConnectivity;
  ConnectivityWeights weights{};
  double threshold = 0.0;
  // Worker threads for per-edge scoring; results do not depend on it.
  unsigned jobs = 1;
};

// Scores every edge. `truth` is required for the perfect estimator.
EdgeScoreMap score_all_edges(const Graph& graph, const ScoreOptions& options,
                             const Partition* truth = nullptr);

// Coefficient of determination of the rescaled score (s + 1) / 2 as a
// predictor of the same-community indicator. nullopt when every edge belongs
// to one class and the prediction is not exact.
std::optional<double> r_squared(const EdgeScoreMap& scores, const Partition& truth,
                                const Graph& graph);

// CSV "u,v,score,label" with a header row and 17 significant digits.
void write_scores_csv(std::ostream& out, const Graph& graph, const EdgeScoreMap& scores);

}  // namespace sepcd
