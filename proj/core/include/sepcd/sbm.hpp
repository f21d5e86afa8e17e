#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sepcd/graph.hpp"

namespace sepcd {

// Stochastic block model. Communities occupy contiguous node ranges in
// order. With `sizes` empty the n nodes are split as evenly as possible,
// the first n % k communities taking one extra node.
struct SbmConfig {
  std::size_t n = 105;
  std::size_t k = 3;
  std::vector<std::size_t> sizes;
  double p_intra = 0.75;
  double p_inter = 0.05;
  std::uint64_t seed = 0;

  // Throws InvalidArgument unless k >= 1, sizes sum to n (when given, with k
  // entries) and 0 <= p_inter <= p_intra <= 1.
  void validate() const;
  std::vector<std::size_t> resolved_sizes() const;
};

struct SbmGraph {
  Graph graph;
  Partition truth;
};

// Every pair i < j, in row-major order, is one independent Bernoulli draw
// from a 64-bit Mersenne Twister seeded with config.seed.
SbmGraph generate_sbm(const SbmConfig& config);

}  // namespace sepcd
