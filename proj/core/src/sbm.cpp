#include "sepcd/sbm.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "sepcd/error.hpp"

namespace sepcd {

void SbmConfig::validate() const {
  if (k < 1) throw InvalidArgument("SBM needs at least one community");
  if (!sizes.empty()) {
    if (sizes.size() != k) throw InvalidArgument("SBM sizes must list one entry per community");
    if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != n) {
      throw InvalidArgument("SBM sizes must sum to n");
    }
    for (std::size_t s : sizes) {
      if (s == 0) throw InvalidArgument("SBM community sizes must be positive");
    }
  } else if (k > n) {
    throw InvalidArgument("SBM has more communities than nodes");
  }
  if (!(p_inter >= 0.0 && p_inter <= p_intra && p_intra <= 1.0)) {
    throw InvalidArgument("SBM needs 0 <= p_inter <= p_intra <= 1, got p_intra=" +
                          std::to_string(p_intra) + " p_inter=" + std::to_string(p_inter));
  }
}

std::vector<std::size_t> SbmConfig::resolved_sizes() const {
  validate();
  if (!sizes.empty()) return sizes;
  std::vector<std::size_t> out(k, n / k);
  for (std::size_t c = 0; c < n % k; ++c) ++out[c];
  return out;
}

SbmGraph generate_sbm(const SbmConfig& config) {
  const auto sizes = config.resolved_sizes();
  std::vector<CommunityId> block;
  block.reserve(config.n);
  for (std::size_t c = 0; c < sizes.size(); ++c) block.insert(block.end(), sizes[c], static_cast<CommunityId>(c));

  std::mt19937_64 rng(config.seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < config.n; ++i) {
    for (NodeId j = i + 1; j < config.n; ++j) {
      const double p = block[i] == block[j] ? config.p_intra : config.p_inter;
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p) edges.push_back({i, j});
    }
  }
  return {Graph::from_edges(config.n, edges), Partition(std::move(block))};
}

}  // namespace sepcd
