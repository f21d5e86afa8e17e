#include "sepcd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>

#include <json.hpp>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr CommunityId kUnassigned = static_cast<CommunityId>(-1);

// Community per node from the cores, kUnassigned for separation nodes. Checks
// that cores and sep_set together cover every node exactly once.
std::vector<CommunityId> seed_assignment(const Graph& graph,
                                         const std::vector<std::vector<NodeId>>& cores,
                                         std::span<const NodeId> sep_set) {
  const std::size_t n = graph.num_nodes();
  std::vector<CommunityId> assignment(n, kUnassigned);
  std::vector<bool> seen(n, false);
  auto claim = [&](NodeId node) {
    if (node >= n) throw InvalidArgument("node " + std::to_string(node) + " out of range");
    if (seen[node]) throw InvalidArgument("node " + std::to_string(node) + " listed twice");
    seen[node] = true;
  };
  for (std::size_t c = 0; c < cores.size(); ++c) {
    if (cores[c].empty()) throw InvalidArgument("empty core");
    for (NodeId node : cores[c]) {
      claim(node);
      assignment[node] = static_cast<CommunityId>(c);
    }
  }
  for (NodeId node : sep_set) claim(node);
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw InvalidArgument("cores and separation set do not cover every node");
  }
  return assignment;
}

std::vector<NodeId> sorted_unique_set(const Graph& graph, std::span<const NodeId> nodes) {
  std::vector<NodeId> out(nodes.begin(), nodes.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidArgument("separation set lists a node twice");
  }
  if (!out.empty() && out.back() >= graph.num_nodes()) {
    throw InvalidArgument("separation node out of range");
  }
  return out;
}

std::vector<std::vector<NodeId>> cores_without(const Graph& graph, std::span<const NodeId> sep_set) {
  std::vector<bool> retained(graph.num_nodes(), true);
  for (NodeId s : sep_set) retained[s] = false;
  return connected_components(graph, retained);
}

// sum_{j in c} B_ij for every community c, scaled by 2m.
std::vector<double> modularity_affinity(const Graph& graph, NodeId node,
                                        const std::vector<CommunityId>& assignment,
                                        const std::vector<double>& community_degree) {
  const double two_m = 2.0 * static_cast<double>(graph.num_edges());
  const double d = static_cast<double>(graph.degree(node));
  std::vector<double> out(community_degree.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = -d * community_degree[c] / two_m;
  for (NodeId j : graph.neighbors(node)) {
    if (assignment[j] != kUnassigned) out[assignment[j]] += 1.0;
  }
  return out;
}

}  // namespace

SeparationResult validate_separation_set(const Graph& graph, const Partition& truth,
                                         std::span<const NodeId> sep_set) {
  if (truth.size() != graph.num_nodes()) throw InvalidArgument("ground truth does not cover graph");
  SeparationResult out;
  out.sep_set = sorted_unique_set(graph, sep_set);
  out.cores = cores_without(graph, out.sep_set);
  out.is_valid = true;
  for (const auto& core : out.cores) {
    const CommunityId c = truth.community(core.front());
    const bool inside = std::all_of(core.begin(), core.end(),
                                    [&](NodeId node) { return truth.community(node) == c; });
    out.refinement.push_back(inside ? std::optional<CommunityId>(c) : std::nullopt);
    out.is_valid = out.is_valid && inside;
  }
  if (!out.is_valid) return out;

  std::vector<std::size_t> hits(truth.num_communities(), 0);
  for (const auto& c : out.refinement) ++hits[*c];
  out.is_injective = std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h <= 1; });
  out.is_surjective = std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h >= 1; });
  return out;
}

std::vector<NodeId> flagged_nodes(std::span<const std::uint8_t> x) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

Partition greedy_assign(const Graph& graph, const std::vector<std::vector<NodeId>>& cores,
                        std::span<const NodeId> sep_set, GreedyStats* stats) {
  std::vector<CommunityId> assignment = seed_assignment(graph, cores, sep_set);
  GreedyStats local;

  // counts[s] maps community -> edges from s into it.
  std::vector<std::map<CommunityId, std::uint32_t>> counts(graph.num_nodes());
  // (count, node, community); the top is the largest count, then the lowest
  // node, then the lowest community. Stale entries are skipped on pop.
  using Entry = std::tuple<std::uint32_t, NodeId, CommunityId>;
  auto worse = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);

  for (NodeId s : sep_set) {
    for (NodeId t : graph.neighbors(s)) {
      if (assignment[t] == kUnassigned) continue;
      ++counts[s][assignment[t]];
      ++local.count_updates;
    }
    for (const auto& [c, count] : counts[s]) queue.emplace(count, s, c);
  }

  while (!queue.empty()) {
    const auto [count, s, c] = queue.top();
    queue.pop();
    if (assignment[s] != kUnassigned || counts[s][c] != count) continue;
    assignment[s] = c;
    ++local.selection_rounds;
    for (NodeId t : graph.neighbors(s)) {
      if (assignment[t] != kUnassigned) continue;
      const std::uint32_t updated = ++counts[t][c];
      ++local.count_updates;
      queue.emplace(updated, t, c);
    }
  }

  // Whatever is left has no edge to any assigned node.
  std::vector<bool> leftover(graph.num_nodes(), false);
  for (NodeId s : sep_set) leftover[s] = assignment[s] == kUnassigned;
  auto next_id = static_cast<CommunityId>(cores.size());
  for (const auto& component : connected_components(graph, leftover)) {
    for (NodeId node : component) assignment[node] = next_id;
    ++next_id;
    ++local.leftover_communities;
  }

  if (stats) *stats = local;
  return Partition(std::move(assignment));
}

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::Anneal ? "anneal" : "exhaustive";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "anneal") return SolverKind::Anneal;
  if (name == "exhaustive") return SolverKind::Exhaustive;
  throw InvalidArgument("unknown solver '" + std::string(name) + "' (anneal, exhaustive)");
}

std::string_view to_string(AssignMethod method) {
  return method == AssignMethod::Greedy ? "greedy" : "clamped";
}

AssignMethod parse_assign(std::string_view name) {
  if (name == "greedy") return AssignMethod::Greedy;
  if (name == "clamped") return AssignMethod::Clamped;
  throw InvalidArgument("unknown assignment '" + std::string(name) + "' (greedy, clamped)");
}

AnnealSchedule SolverSettings::schedule_for(const QuboProblem& problem) const {
  AnnealSchedule s = AnnealSchedule::defaults_for(problem, seed);
  if (initial_temp) s.initial_temp = *initial_temp;
  s.final_temp = final_temp;
  s.sweeps = sweeps;
  s.restarts = restarts;
  // A problem whose coefficients are all below final_temp would otherwise
  // get an inverted schedule.
  if (!initial_temp) s.initial_temp = std::max(s.initial_temp, s.final_temp);
  s.validate();
  return s;
}

SolverResult SolverSettings::solve(const QuboProblem& problem) const {
  if (kind == SolverKind::Exhaustive) return exhaustive(problem);
  return anneal(problem, schedule_for(problem), jobs);
}

Partition clamped_modularity_assign(const Graph& graph,
                                    const std::vector<std::vector<NodeId>>& cores,
                                    std::span<const NodeId> sep_set,
                                    const SolverSettings& solver, double penalty_weight,
                                    ClampedStats* stats) {
  if (cores.empty()) {
    throw DegenerateOutcome("no community cores to clamp",
                            std::vector<NodeId>(sep_set.begin(), sep_set.end()));
  }
  std::vector<CommunityId> assignment = seed_assignment(graph, cores, sep_set);
  ClampedStats local;
  const std::size_t k = cores.size();
  if (sep_set.empty() || k == 1 || graph.num_edges() == 0) {
    // Nothing to optimize: a single community, or no edges to weigh.
    for (NodeId s : sep_set) assignment[s] = 0;
    if (stats) *stats = local;
    return Partition(std::move(assignment));
  }

  Clamp clamp(graph.num_nodes());
  for (NodeId node = 0; node < graph.num_nodes(); ++node) {
    if (assignment[node] != kUnassigned) clamp[node] = assignment[node];
  }
  const QuboProblem problem = modularity_qubo_onehot(graph, k, clamp, penalty_weight);
  const SolverResult result = solver.solve(problem);
  local.num_vars = problem.num_vars();
  local.energy = result.best_energy;

  // Free variables are node-major: node sorted[i] owns vars i*k .. i*k+k-1.
  std::vector<NodeId> free_nodes(sep_set.begin(), sep_set.end());
  std::sort(free_nodes.begin(), free_nodes.end());
  std::vector<NodeId> needs_repair;
  for (std::size_t i = 0; i < free_nodes.size(); ++i) {
    const auto row = std::span(result.best_x).subspan(i * k, k);
    if (std::count(row.begin(), row.end(), std::uint8_t{1}) == 1) {
      assignment[free_nodes[i]] =
          static_cast<CommunityId>(std::find(row.begin(), row.end(), 1) - row.begin());
    } else {
      needs_repair.push_back(static_cast<NodeId>(i));
    }
  }

  std::vector<double> community_degree(k, 0.0);
  for (NodeId node = 0; node < graph.num_nodes(); ++node) {
    if (assignment[node] != kUnassigned) {
      community_degree[assignment[node]] += static_cast<double>(graph.degree(node));
    }
  }
  for (NodeId i : needs_repair) {
    const NodeId node = free_nodes[i];
    const auto row = std::span(result.best_x).subspan(std::size_t{i} * k, k);
    const bool any = std::find(row.begin(), row.end(), 1) != row.end();
    const auto affinity = modularity_affinity(graph, node, assignment, community_degree);
    std::optional<CommunityId> best;
    for (CommunityId c = 0; c < k; ++c) {
      if (any && !row[c]) continue;
      if (!best || affinity[c] > affinity[*best]) best = c;
    }
    assignment[node] = *best;
    community_degree[*best] += static_cast<double>(graph.degree(node));
    ++local.repaired_nodes;
  }

  if (stats) *stats = local;
  return Partition(std::move(assignment));
}

DetectionOutput detect(const Graph& graph, const DetectionConfig& config, const Partition* truth) {
  if (graph.num_nodes() == 0) throw InvalidArgument("graph has no nodes");
  if (truth && truth->size() != graph.num_nodes()) {
    throw InvalidArgument("ground truth does not cover graph");
  }
  const auto start = Clock::now();
  DetectionOutput out;
  DetectionStats& stats = out.stats;
  stats.num_nodes = graph.num_nodes();
  stats.num_edges = graph.num_edges();

  auto t = Clock::now();
  out.scores = score_all_edges(graph, config.scoring, truth);
  const EdgeScoreMap& scores = out.scores;
  stats.separation_edges = scores.num_separation_edges();
  stats.timings.score_ms = elapsed_ms(t);

  t = Clock::now();
  const QuboProblem qubo = build_separation_qubo(graph, scores);
  stats.qubo_vars = qubo.num_vars();
  stats.qubo_quadratic_terms = qubo.quadratic().size();
  stats.timings.qubo_ms = elapsed_ms(t);

  t = Clock::now();
  const SolverResult solution = config.solver.solve(qubo);
  stats.qubo_energy = solution.best_energy;
  stats.penalty = separation_penalty(graph, scores, solution.best_x);
  stats.timings.solve_ms = elapsed_ms(t);

  t = Clock::now();
  out.sep_set = flagged_nodes(solution.best_x);
  out.cores = cores_without(graph, out.sep_set);
  stats.sep_size = out.sep_set.size();
  stats.num_cores = out.cores.size();
  if (truth) {
    const SeparationResult check = validate_separation_set(graph, *truth, out.sep_set);
    stats.is_valid = check.is_valid;
    stats.is_injective = check.is_injective;
    stats.is_surjective = check.is_surjective;
  }
  stats.timings.components_ms = elapsed_ms(t);
  if (out.cores.empty()) {
    throw DegenerateOutcome("every node was flagged as a separation node", out.sep_set);
  }

  t = Clock::now();
  out.method = std::string(to_string(config.assign));
  if (config.assign == AssignMethod::Greedy) {
    out.partition = greedy_assign(graph, out.cores, out.sep_set, &stats.greedy);
  } else {
    out.partition = clamped_modularity_assign(graph, out.cores, out.sep_set, config.solver,
                                              config.penalty_weight, &stats.clamped);
  }
  stats.num_communities = out.partition.num_communities();
  stats.timings.assign_ms = elapsed_ms(t);
  stats.timings.total_ms = elapsed_ms(start);
  return out;
}

void write_detection_json(std::ostream& out, const DetectionOutput& output,
                          const DetectionConfig& config) {
  using nlohmann::json;
  const SolverSettings& solver = config.solver;
  json cfg = {
      {"estimator", to_string(config.scoring.estimator)},
      {"weights", config.scoring.weights.to_string()},
      {"radius", config.scoring.weights.radius()},
      {"threshold", config.scoring.threshold},
      {"solver", to_string(solver.kind)},
      {"temp0", solver.initial_temp ? json(*solver.initial_temp) : json("auto")},
      {"temp1", solver.final_temp},
      {"sweeps", solver.sweeps},
      {"restarts", solver.restarts},
      {"seed", solver.seed},
      {"jobs", solver.jobs},
      {"assign", to_string(config.assign)},
      {"penalty_weight", config.penalty_weight},
  };
  const DetectionStats& s = output.stats;
  auto optional_flag = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  json stats = {
      {"num_nodes", s.num_nodes},
      {"num_edges", s.num_edges},
      {"separation_edges", s.separation_edges},
      {"qubo_vars", s.qubo_vars},
      {"qubo_quadratic_terms", s.qubo_quadratic_terms},
      {"qubo_energy", s.qubo_energy},
      {"penalty", s.penalty},
      {"sep_size", s.sep_size},
      {"num_cores", s.num_cores},
      {"num_communities", s.num_communities},
      {"greedy", {{"count_updates", s.greedy.count_updates},
                  {"selection_rounds", s.greedy.selection_rounds},
                  {"leftover_communities", s.greedy.leftover_communities}}},
      {"clamped", {{"num_vars", s.clamped.num_vars},
                   {"repaired_nodes", s.clamped.repaired_nodes},
                   {"energy", s.clamped.energy}}},
      {"is_valid", optional_flag(s.is_valid)},
      {"is_injective", optional_flag(s.is_injective)},
      {"is_surjective", optional_flag(s.is_surjective)},
      {"timings_ms", {{"score", s.timings.score_ms},
                      {"qubo", s.timings.qubo_ms},
                      {"solve", s.timings.solve_ms},
                      {"components", s.timings.components_ms},
                      {"assign", s.timings.assign_ms},
                      {"total", s.timings.total_ms}}},
  };
  json doc = {
      {"config", cfg},
      {"method", output.method},
      {"num_communities", output.partition.num_communities()},
      {"partition", output.partition.assignment()},
      {"sep_set", output.sep_set},
      {"stats", stats},
  };
  out << doc.dump(2) << '\n';
}

}  // namespace sepcd
