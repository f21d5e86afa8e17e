#pragma once

#include <filesystem>
#include <iosfwd>

#include "sepcd/graph.hpp"

namespace sepcd {

// Edge-list text format: one "u v" pair of non-negative integers per line,
// whitespace separated; lines starting with '#' are comments. n is the largest
// id + 1, unless a "# nodes N" comment (as emitted by write_edge_list) asks for
// more, which keeps trailing isolated nodes across a round trip.
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& graph);
void save_edge_list(const std::filesystem::path& path, const Graph& graph);

// Partition text format: one "node community" pair per line. Every node of
// the graph must appear exactly once; labels are remapped to dense ids.
Partition read_partition(std::istream& in, std::size_t num_nodes);
Partition load_partition(const std::filesystem::path& path, const Graph& graph);
void write_partition(std::ostream& out, const Partition& partition);
void save_partition(const std::filesystem::path& path, const Partition& partition);

}  // namespace sepcd
