#include "sepcd/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename Int>
Int parse_int(std::string_view token, std::size_t line_no, const char* what) {
  Int value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(token) + "'", line_no);
  }
  return value;
}

NodeId parse_node(std::string_view token, std::size_t line_no) {
  if (!token.empty() && token.front() == '-') {
    throw ParseError("negative node id '" + std::string(token) + "'", line_no);
  }
  return parse_int<NodeId>(token, line_no, "node id");
}

// "# nodes N" header written by write_edge_list.
std::optional<std::size_t> node_count_hint(std::string_view line) {
  auto tokens = split_ws(line.substr(1));
  if (tokens.size() != 2 || tokens[0] != "nodes") return std::nullopt;
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), n);
  if (ec != std::errc{} || ptr != tokens[1].data() + tokens[1].size()) return std::nullopt;
  return n;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t num_nodes = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    view.remove_prefix(first);
    if (view.front() == '#') {
      if (auto hint = node_count_hint(view)) num_nodes = std::max(num_nodes, *hint);
      continue;
    }
    auto tokens = split_ws(view);
    if (tokens.size() == 3) {
      throw ParseError("weighted edges are not supported (third column found)", line_no);
    }
    if (tokens.size() != 2) {
      throw ParseError("expected 'u v', got " + std::to_string(tokens.size()) + " fields", line_no);
    }
    const NodeId u = parse_node(tokens[0], line_no);
    const NodeId v = parse_node(tokens[1], line_no);
    if (u == v) throw ParseError("self-loop on node " + std::to_string(u), line_no);
    edges.push_back({u, v});
    num_nodes = std::max<std::size_t>(num_nodes, std::max(u, v) + std::size_t{1});
  }
  return Graph::from_edges(num_nodes, edges);
}

Graph load_edge_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# nodes " << graph.num_nodes() << '\n';
  for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

void save_edge_list(const std::filesystem::path& path, const Graph& graph) {
  auto out = open_output(path);
  write_edge_list(out, graph);
}

Partition read_partition(std::istream& in, std::size_t num_nodes) {
  std::vector<std::int64_t> labels(num_nodes, 0);
  std::vector<bool> seen(num_nodes, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || view[first] == '#') continue;
    auto tokens = split_ws(view);
    if (tokens.size() != 2) {
      throw ParseError("expected 'node community', got " + std::to_string(tokens.size()) +
                           " fields",
                       line_no);
    }
    const NodeId node = parse_node(tokens[0], line_no);
    const auto label = parse_int<std::int64_t>(tokens[1], line_no, "community label");
    if (node >= num_nodes) {
      throw ParseError("node " + std::to_string(node) + " out of range for " +
                           std::to_string(num_nodes) + " nodes",
                       line_no);
    }
    if (seen[node] && labels[node] != label) {
      throw ParseError("node " + std::to_string(node) + " assigned twice", line_no);
    }
    seen[node] = true;
    labels[node] = label;
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (!seen[v]) throw ParseError("missing community for node " + std::to_string(v), 0);
  }
  return Partition::from_labels(labels);
}

Partition load_partition(const std::filesystem::path& path, const Graph& graph) {
  auto in = open_input(path);
  return read_partition(in, graph.num_nodes());
}

void write_partition(std::ostream& out, const Partition& partition) {
  for (NodeId v = 0; v < partition.size(); ++v) out << v << ' ' << partition.community(v) << '\n';
}

void save_partition(const std::filesystem::path& path, const Partition& partition) {
  auto out = open_output(path);
  write_partition(out, partition);
}

}  // namespace sepcd
