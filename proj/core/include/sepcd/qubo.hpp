#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sepcd/estimate.hpp"
#include "sepcd/graph.hpp"
#include "sepcd/types.hpp"

namespace sepcd {

struct LinearTerm {
  VarIndex var = 0;
  double coefficient = 0.0;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

// Coupling between i < j.
struct QuadraticTerm {
  VarIndex i = 0;
  VarIndex j = 0;
  double coefficient = 0.0;

  friend bool operator==(const QuadraticTerm&, const QuadraticTerm&) = default;
};

// What a variable stands for: a node, or a (node, community) one-hot slot.
struct VarMeaning {
  NodeId node = 0;
  std::optional<CommunityId> community;

  friend bool operator==(const VarMeaning&, const VarMeaning&) = default;
};

// energy(x) = offset + sum_i linear_i x_i + sum_{i<j} quadratic_ij x_i x_j.
// Terms are sorted by variable index and never carry a zero coefficient.
class QuboProblem {
 public:
  QuboProblem() = default;

  std::size_t num_vars() const noexcept { return num_vars_; }
  double offset() const noexcept { return offset_; }
  const std::vector<LinearTerm>& linear() const noexcept { return linear_; }
  const std::vector<QuadraticTerm>& quadratic() const noexcept { return quadratic_; }
  const std::vector<VarMeaning>& var_meaning() const noexcept { return meaning_; }

  double energy(std::span<const std::uint8_t> x) const;

  // True when the offset and all coefficients are integers small enough for
  // exact 64-bit evaluation.
  bool is_integral() const;
  double max_abs_coefficient() const;

  friend bool operator==(const QuboProblem&, const QuboProblem&) = default;

 private:
  friend class QuboBuilder;

  std::size_t num_vars_ = 0;
  double offset_ = 0.0;
  std::vector<LinearTerm> linear_;
  std::vector<QuadraticTerm> quadratic_;
  std::vector<VarMeaning> meaning_;
};

// Accumulates terms; repeated keys add up. x_i * x_i folds into linear.
class QuboBuilder {
 public:
  explicit QuboBuilder(std::size_t num_vars);

  QuboBuilder& add_offset(double c);
  QuboBuilder& add_linear(VarIndex i, double c);
  QuboBuilder& add_quadratic(VarIndex i, VarIndex j, double c);
  QuboBuilder& set_meaning(VarIndex i, VarMeaning meaning);

  QuboProblem build() const;

 private:
  void check(VarIndex i) const;

  std::size_t num_vars_;
  double offset_ = 0.0;
  std::map<VarIndex, double> linear_;
  std::map<std::pair<VarIndex, VarIndex>, double> quadratic_;
  std::vector<VarMeaning> meaning_;
};

// Separation-node QUBO: one variable per node (0 flags a separation node),
// linear -1 everywhere and +4 on every edge labeled as separation-edge. The
// +4 is the weight 2 on the penalty times the two ordered pairs per edge.
QuboProblem build_separation_qubo(const Graph& graph, const EdgeScoreMap& labels);

// Penalty P(x) = sum over ordered pairs (i, j) of a_ij * label_ij * x_i x_j,
// i.e. twice the number of separation-labeled edges with both ends kept.
long long separation_penalty(const Graph& graph, const EdgeScoreMap& labels,
                             std::span<const std::uint8_t> x);

// Max-Clique QUBO: linear -1, +4 on every non-edge.
QuboProblem max_clique_qubo(const Graph& graph);

// Two-community modularity as a minimization: energy(x) equals minus the
// modularity contribution of the x = 1 side, (1/2m) sum_ij B_ij x_i x_j with
// B = A - d d^T / 2m summed over ordered pairs including i = j.
QuboProblem modularity_qubo_k2(const Graph& graph);

// Node -> fixed community for clamped nodes.
using Clamp = std::vector<std::optional<CommunityId>>;

// One-hot modularity QUBO over k communities with an optional clamp. Free
// nodes get k variables (node-major, in node order); clamped nodes fold into
// linear terms and the offset. Penalty lambda * (1 - sum_l x_i^l)^2 per free
// node. For one-hot x the energy is minus the modularity of the partition.
QuboProblem modularity_qubo_onehot(const Graph& graph, std::size_t k, const Clamp& clamp,
                                   double penalty_weight = 2.0);

// Sparse text format: header "n offset", then "i i c" for linear and "i j c"
// (i < j) for quadratic terms, coefficients with 17 significant digits.
void write_qubo(std::ostream& out, const QuboProblem& problem);
QuboProblem read_qubo(std::istream& in);

}  // namespace sepcd
