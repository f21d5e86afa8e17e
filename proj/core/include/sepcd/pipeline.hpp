#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sepcd/estimate.hpp"
#include "sepcd/graph.hpp"
#include "sepcd/qubo.hpp"
#include "sepcd/solve.hpp"

namespace sepcd {

// Outcome of removing a separation-node set, checked against ground truth.
struct SeparationResult {
  std::vector<NodeId> sep_set;              // sorted
  std::vector<std::vector<NodeId>> cores;   // components of V \ S
  // Community containing each core, nullopt for a core spanning several.
  std::vector<std::optional<CommunityId>> refinement;
  bool is_valid = false;
  bool is_injective = false;   // false whenever !is_valid
  bool is_surjective = false;  // false whenever !is_valid
};

// Throws InvalidArgument on out-of-range or repeated nodes, or a truth
// partition of the wrong size.
SeparationResult validate_separation_set(const Graph& graph, const Partition& truth,
                                         std::span<const NodeId> sep_set);

// Nodes whose flag is 0, ascending.
std::vector<NodeId> flagged_nodes(std::span<const std::uint8_t> x);

struct GreedyStats {
  std::uint64_t count_updates = 0;     // per-(node, community) edge-count increments
  std::uint64_t selection_rounds = 0;  // nodes placed by the max-count rule
  std::size_t leftover_communities = 0;
};

// Core i becomes community i. Each round places the unassigned separation
// node with the most edges into a single community there; ties go to the
// lowest node id, then the lowest community id. Nodes that never touch a
// community end up as fresh communities, one per connected leftover
// component. Throws InvalidArgument unless cores and sep_set partition V.
Partition greedy_assign(const Graph& graph, const std::vector<std::vector<NodeId>>& cores,
                        std::span<const NodeId> sep_set, GreedyStats* stats = nullptr);

enum class SolverKind { Anneal, Exhaustive };
std::string_view to_string(SolverKind kind);
SolverKind parse_solver(std::string_view name);

enum class AssignMethod { Greedy, Clamped };
std::string_view to_string(AssignMethod method);
AssignMethod parse_assign(std::string_view name);

// Annealing parameters shared by every QUBO the pipeline solves. Without an
// explicit initial_temp each problem starts at its largest |coefficient|.
struct SolverSettings {
  SolverKind kind = SolverKind::Anneal;
  std::optional<double> initial_temp;
  double final_temp = 1e-3;
  std::uint32_t sweeps = 1000;
  std::uint32_t restarts = 10;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  AnnealSchedule schedule_for(const QuboProblem& problem) const;
  SolverResult solve(const QuboProblem& problem) const;
};

struct ClampedStats {
  std::size_t num_vars = 0;          // |sep_set| * |cores|
  std::size_t repaired_nodes = 0;    // rows that were not one-hot
  double energy = 0.0;
};

// Assigns separation nodes by minimizing the one-hot modularity QUBO with
// every core node clamped to its core. Rows that are not one-hot are
// repaired by the largest modularity affinity sum_j B_ij over the members of
// each candidate community (the set bits, or all communities if none is
// set), ties to the lowest id. Throws DegenerateOutcome when there are no
// cores.
Partition clamped_modularity_assign(const Graph& graph,
                                    const std::vector<std::vector<NodeId>>& cores,
                                    std::span<const NodeId> sep_set,
                                    const SolverSettings& solver, double penalty_weight = 2.0,
                                    ClampedStats* stats = nullptr);

struct DetectionConfig {
  ScoreOptions scoring{};
  SolverSettings solver{};
  AssignMethod assign = AssignMethod::Greedy;
  double penalty_weight = 2.0;  // one-hot penalty of the clamped assignment
};

struct StageTimings {
  double score_ms = 0.0;
  double qubo_ms = 0.0;
  double solve_ms = 0.0;
  double components_ms = 0.0;
  double assign_ms = 0.0;
  double total_ms = 0.0;
};

struct DetectionStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t separation_edges = 0;
  std::size_t qubo_vars = 0;
  std::size_t qubo_quadratic_terms = 0;
  double qubo_energy = 0.0;
  long long penalty = 0;  // separation penalty P(x) of the solution
  std::size_t sep_size = 0;
  std::size_t num_cores = 0;
  std::size_t num_communities = 0;
  GreedyStats greedy{};
  ClampedStats clamped{};
  // Against ground truth, when one was supplied.
  std::optional<bool> is_valid;
  std::optional<bool> is_injective;
  std::optional<bool> is_surjective;
  StageTimings timings{};
};

struct DetectionOutput {
  Partition partition;
  std::vector<NodeId> sep_set;
  std::vector<std::vector<NodeId>> cores;
  EdgeScoreMap scores;
  std::string method;
  DetectionStats stats;
};

// score edges -> separation QUBO -> solve -> cores -> assignment. `truth`
// feeds the perfect estimator and the validity flags in the stats. Throws
// DegenerateOutcome (carrying the raw set) when every node is flagged.
DetectionOutput detect(const Graph& graph, const DetectionConfig& config,
                       const Partition* truth = nullptr);

// JSON document with the resolved config, partition, separation set and
// stats.
void write_detection_json(std::ostream& out, const DetectionOutput& output,
                          const DetectionConfig& config);

}  // namespace sepcd
