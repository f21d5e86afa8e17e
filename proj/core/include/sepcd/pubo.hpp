#pragma once

// Polynomial (higher-order) penalty terms for surjective and injective
// separation-node sets. These are only meant for brute-force evaluation on
// toy graphs; nothing here is quadratized or fed to the annealer.

#include <cstddef>
#include <span>
#include <vector>

#include "sepcd/graph.hpp"
#include "sepcd/types.hpp"

namespace sepcd {

// coefficient * prod_{v in vars} x_v. An empty variable set is a constant.
struct PuboTerm {
  double coefficient = 0.0;
  std::vector<VarIndex> vars;  // sorted, duplicate-free

  friend bool operator==(const PuboTerm&, const PuboTerm&) = default;
};

using Pubo = std::vector<PuboTerm>;

// Sorts variables, merges identical monomials (x^2 = x) and drops zeros.
Pubo canonicalize(const Pubo& terms);

double evaluate_pubo(const Pubo& terms, std::span<const std::uint8_t> x);

// Highest variable index used plus one.
std::size_t pubo_num_vars(const Pubo& terms);

// Number of kept (x = 1) nodes sharing the community of `node`.
long long surjectivity_term(const Graph& graph, const Partition& truth,
                            std::span<const std::uint8_t> x, NodeId node);

// The same sum as a polynomial in x.
Pubo surjectivity_polynomial(const Partition& truth, NodeId node);

// Graphs above this size are rejected by the path-enumerating terms.
inline constexpr std::size_t kMaxPathEnumerationNodes = 12;

// Number of simple paths from u to v that stay inside the common community
// and consist of kept nodes only (endpoints included). u and v must differ
// and share a community.
long long injectivity_term(const Graph& graph, const Partition& truth,
                           std::span<const std::uint8_t> x, NodeId u, NodeId v);

// One monomial per simple intra-community path between u and v.
Pubo injectivity_polynomial(const Graph& graph, const Partition& truth, NodeId u, NodeId v);

struct ThresholdPenalty {
  Pubo match;      // (f(x) - sum_i 2^i y_i)^2
  Pubo nonzero;    // prod_i (1 - y_i)
  std::size_t num_ancillas = 0;
};

// Penalty pair whose minimum over the ancillas y is 0 iff f(x) > 0, for f
// with values in {0, ..., m_bound}. Ancilla i is variable ancilla_offset + i;
// there are ceil(log2(m_bound)) + 1 of them.
ThresholdPenalty threshold_penalty(const Pubo& f, long long m_bound, VarIndex ancilla_offset);

}  // namespace sepcd
