#include "sepcd/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

// Largest magnitude for which the integer annealing path stays exact even
// after summing a few million terms.
constexpr double kIntegralLimit = 1e12;

std::string format_coefficient(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

void require_labels(const Graph& graph, const EdgeScoreMap& labels) {
  if (labels.labels.size() != graph.num_edges()) {
    throw InvalidArgument("edge labels cover " + std::to_string(labels.labels.size()) +
                          " edges, graph has " + std::to_string(graph.num_edges()));
  }
}

}  // namespace

double QuboProblem::energy(std::span<const std::uint8_t> x) const {
  if (x.size() != num_vars_) throw InvalidArgument("assignment length does not match QUBO");
  double e = offset_;
  for (const auto& t : linear_) e += x[t.var] ? t.coefficient : 0.0;
  for (const auto& t : quadratic_) e += (x[t.i] && x[t.j]) ? t.coefficient : 0.0;
  return e;
}

bool QuboProblem::is_integral() const {
  auto integral = [](double c) { return std::abs(c) <= kIntegralLimit && std::nearbyint(c) == c; };
  if (!integral(offset_)) return false;
  for (const auto& t : linear_) {
    if (!integral(t.coefficient)) return false;
  }
  for (const auto& t : quadratic_) {
    if (!integral(t.coefficient)) return false;
  }
  return true;
}

double QuboProblem::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& t : linear_) m = std::max(m, std::abs(t.coefficient));
  for (const auto& t : quadratic_) m = std::max(m, std::abs(t.coefficient));
  return m;
}

QuboBuilder::QuboBuilder(std::size_t num_vars) : num_vars_(num_vars), meaning_(num_vars) {
  for (std::size_t i = 0; i < num_vars; ++i) meaning_[i].node = static_cast<NodeId>(i);
}

void QuboBuilder::check(VarIndex i) const {
  if (i >= num_vars_) {
    throw InvalidArgument("variable " + std::to_string(i) + " out of range for " +
                          std::to_string(num_vars_) + " variables");
  }
}

QuboBuilder& QuboBuilder::add_offset(double c) {
  offset_ += c;
  return *this;
}

QuboBuilder& QuboBuilder::add_linear(VarIndex i, double c) {
  check(i);
  linear_[i] += c;
  return *this;
}

QuboBuilder& QuboBuilder::add_quadratic(VarIndex i, VarIndex j, double c) {
  check(i);
  check(j);
  if (i == j) return add_linear(i, c);
  quadratic_[{std::min(i, j), std::max(i, j)}] += c;
  return *this;
}

QuboBuilder& QuboBuilder::set_meaning(VarIndex i, VarMeaning meaning) {
  check(i);
  meaning_[i] = meaning;
  return *this;
}

QuboProblem QuboBuilder::build() const {
  QuboProblem p;
  p.num_vars_ = num_vars_;
  p.offset_ = offset_;
  for (const auto& [i, c] : linear_) {
    if (c != 0.0) p.linear_.push_back({i, c});
  }
  for (const auto& [key, c] : quadratic_) {
    if (c != 0.0) p.quadratic_.push_back({key.first, key.second, c});
  }
  p.meaning_ = meaning_;
  return p;
}

QuboProblem build_separation_qubo(const Graph& graph, const EdgeScoreMap& labels) {
  require_labels(graph, labels);
  QuboBuilder b(graph.num_nodes());
  for (VarIndex i = 0; i < graph.num_nodes(); ++i) b.add_linear(i, -1.0);
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    if (labels.labels[e]) b.add_quadratic(graph.edges()[e].u, graph.edges()[e].v, 4.0);
  }
  return b.build();
}

long long separation_penalty(const Graph& graph, const EdgeScoreMap& labels,
                             std::span<const std::uint8_t> x) {
  require_labels(graph, labels);
  if (x.size() != graph.num_nodes()) throw InvalidArgument("assignment length does not match graph");
  long long p = 0;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edges()[e];
    if (labels.labels[e] && x[edge.u] && x[edge.v]) p += 2;
  }
  return p;
}

QuboProblem max_clique_qubo(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  QuboBuilder b(n);
  for (VarIndex i = 0; i < n; ++i) {
    b.add_linear(i, -1.0);
    for (VarIndex j = i + 1; j < n; ++j) {
      if (!graph.has_edge(i, j)) b.add_quadratic(i, j, 4.0);
    }
  }
  return b.build();
}

QuboProblem modularity_qubo_k2(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  const double two_m = 2.0 * static_cast<double>(graph.num_edges());
  if (two_m == 0.0) throw InvalidArgument("modularity QUBO undefined on an edgeless graph");
  QuboBuilder b(n);
  for (VarIndex i = 0; i < n; ++i) {
    const double di = static_cast<double>(graph.degree(i));
    b.add_linear(i, (di * di / two_m) / two_m);
    for (VarIndex j = i + 1; j < n; ++j) {
      const double a = graph.has_edge(i, j) ? 1.0 : 0.0;
      const double bij = a - di * static_cast<double>(graph.degree(j)) / two_m;
      b.add_quadratic(i, j, -2.0 * bij / two_m);
    }
  }
  return b.build();
}

QuboProblem modularity_qubo_onehot(const Graph& graph, std::size_t k, const Clamp& clamp,
                                   double penalty_weight) {
  const std::size_t n = graph.num_nodes();
  const double two_m = 2.0 * static_cast<double>(graph.num_edges());
  if (two_m == 0.0) throw InvalidArgument("modularity QUBO undefined on an edgeless graph");
  if (k < 2) throw InvalidArgument("one-hot modularity QUBO needs k >= 2");
  if (!(penalty_weight > 0.0)) throw InvalidArgument("penalty weight must be positive");
  if (!clamp.empty() && clamp.size() != n) throw InvalidArgument("clamp does not cover the graph");

  auto clamped = [&](NodeId v) -> std::optional<CommunityId> {
    return clamp.empty() ? std::nullopt : clamp[v];
  };
  std::vector<NodeId> free_nodes;
  std::vector<double> clamped_degree(k, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    if (auto c = clamped(v)) {
      if (*c >= k) throw InvalidArgument("clamped community id out of range");
      clamped_degree[*c] += static_cast<double>(graph.degree(v));
    } else {
      free_nodes.push_back(v);
    }
  }

  QuboBuilder b(free_nodes.size() * k);
  std::vector<std::optional<VarIndex>> first_var(n);
  for (std::size_t f = 0; f < free_nodes.size(); ++f) {
    first_var[free_nodes[f]] = static_cast<VarIndex>(f * k);
    for (std::size_t l = 0; l < k; ++l) {
      b.set_meaning(static_cast<VarIndex>(f * k + l),
                    {free_nodes[f], static_cast<CommunityId>(l)});
    }
  }

  // Clamped-clamped pairs: sum_l (2 e_l - D_l^2 / 2m), with e_l the edges
  // inside clamped community l.
  double internal = 0.0;
  for (const Edge& e : graph.edges()) {
    auto cu = clamped(e.u), cv = clamped(e.v);
    if (cu && cv && *cu == *cv) internal += 2.0;
  }
  for (double d : clamped_degree) internal -= d * d / two_m;
  b.add_offset(-internal / two_m);

  for (NodeId v : free_nodes) {
    const VarIndex base = *first_var[v];
    const double dv = static_cast<double>(graph.degree(v));
    // Free-clamped pairs, both orders.
    std::vector<double> edges_to(k, 0.0);
    for (NodeId w : graph.neighbors(v)) {
      if (auto c = clamped(w)) edges_to[*c] += 1.0;
    }
    for (std::size_t l = 0; l < k; ++l) {
      const double sum_b = edges_to[l] - dv * clamped_degree[l] / two_m;
      b.add_linear(base + static_cast<VarIndex>(l), -2.0 * sum_b / two_m);
      // Diagonal B_vv = -d_v^2 / 2m.
      b.add_linear(base + static_cast<VarIndex>(l), (dv * dv / two_m) / two_m);
    }
    // One-hot penalty: lambda (1 - sum_l x_l)^2 = lambda - lambda sum_l x_l
    // + 2 lambda sum_{l<l'} x_l x_l'.
    b.add_offset(penalty_weight);
    for (std::size_t l = 0; l < k; ++l) {
      b.add_linear(base + static_cast<VarIndex>(l), -penalty_weight);
      for (std::size_t l2 = l + 1; l2 < k; ++l2) {
        b.add_quadratic(base + static_cast<VarIndex>(l), base + static_cast<VarIndex>(l2),
                        2.0 * penalty_weight);
      }
    }
  }

  // Free-free pairs.
  for (std::size_t a = 0; a < free_nodes.size(); ++a) {
    const NodeId v = free_nodes[a];
    const double dv = static_cast<double>(graph.degree(v));
    for (std::size_t c = a + 1; c < free_nodes.size(); ++c) {
      const NodeId w = free_nodes[c];
      const double bvw = (graph.has_edge(v, w) ? 1.0 : 0.0) -
                         dv * static_cast<double>(graph.degree(w)) / two_m;
      for (std::size_t l = 0; l < k; ++l) {
        b.add_quadratic(*first_var[v] + static_cast<VarIndex>(l),
                        *first_var[w] + static_cast<VarIndex>(l), -2.0 * bvw / two_m);
      }
    }
  }
  return b.build();
}

void write_qubo(std::ostream& out, const QuboProblem& problem) {
  out << problem.num_vars() << ' ' << format_coefficient(problem.offset()) << '\n';
  for (const auto& t : problem.linear()) {
    out << t.var << ' ' << t.var << ' ' << format_coefficient(t.coefficient) << '\n';
  }
  for (const auto& t : problem.quadratic()) {
    out << t.i << ' ' << t.j << ' ' << format_coefficient(t.coefficient) << '\n';
  }
}

QuboProblem read_qubo(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };

  auto parse_double = [&](const std::string& token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v)) {
      throw ParseError("malformed coefficient '" + token + "'", line_no);
    }
    return v;
  };
  auto parse_index = [&](const std::string& token) -> unsigned long long {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("malformed index '" + token + "'", line_no);
    }
    return std::stoull(token);
  };
  auto tokens_of = [&](std::size_t expected) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) + " fields", line_no);
    }
    return tokens;
  };

  if (!next_line()) throw ParseError("missing 'n offset' header", 0);
  auto header = tokens_of(2);
  const auto n = parse_index(header[0]);
  QuboBuilder b(static_cast<std::size_t>(n));
  b.add_offset(parse_double(header[1]));
  while (next_line()) {
    auto t = tokens_of(3);
    const auto i = parse_index(t[0]);
    const auto j = parse_index(t[1]);
    if (i >= n || j >= n) throw ParseError("variable index out of range", line_no);
    b.add_quadratic(static_cast<VarIndex>(i), static_cast<VarIndex>(j), parse_double(t[2]));
  }
  return b.build();
}

}  // namespace sepcd
