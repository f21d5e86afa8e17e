#pragma once

#include <cstddef>
#include <span>

#include "sepcd/graph.hpp"

namespace sepcd {

// (1/2m) sum over ordered same-community pairs (i, j), i = j included, of
// a_ij - d_i d_j / 2m. Throws InvalidArgument on an edgeless graph or a
// partition of the wrong size.
double modularity(const Graph& graph, const Partition& partition);

// Mutual information over the arithmetic mean of the two entropies (natural
// log). Two single-community partitions score 1; if exactly one of them is a
// single community the score is 0. Throws InvalidArgument on a size mismatch.
double nmi(const Partition& a, const Partition& b);

// |found| / |best_known|. Throws InvalidArgument when best_known is empty.
double size_deviation(std::size_t found, std::size_t best_known);
double size_deviation(std::span<const NodeId> found, std::span<const NodeId> best_known);

}  // namespace sepcd
