#pragma once

#include <cstdint>
#include <vector>

namespace sepcd {

using NodeId = std::uint32_t;
using CommunityId = std::uint32_t;
using VarIndex = std::uint32_t;

// Binary assignment of QUBO/PUBO variables. For the separation QUBO a 0 flags
// a separation node.
using BitVector = std::vector<std::uint8_t>;

}  // namespace sepcd
