#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepcd/error.hpp"
#include "sepcd/estimate.hpp"
#include "sepcd/experiment.hpp"
#include "sepcd/graph_io.hpp"
#include "sepcd/metrics.hpp"
#include "sepcd/pipeline.hpp"
#include "sepcd/qubo.hpp"
#include "sepcd/sbm.hpp"
#include "sepcd/solve.hpp"

namespace sepcd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags shared by every subcommand that scores edges or anneals.
struct Flags {
  std::string graph;
  std::string truth;
  std::string estimator = "nu";
  std::optional<std::size_t> radius;
  std::string weights;
  double threshold = 0.0;
  std::string assign = "greedy";
  double penalty_weight = 2.0;
  std::string solver = "anneal";
  std::uint32_t sweeps = 1000;
  std::uint32_t restarts = 10;
  std::optional<double> temp0;
  double temp1 = 1e-3;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
};

void add_scoring_flags(CLI::App* app, Flags& f) {
  app->add_option("--estimator", f.estimator, "perfect, modularity or nu")->capture_default_str();
  app->add_option("--radius", f.radius, "neighborhood radius d (uniform weights unless --weights)");
  app->add_option("--weights", f.weights, "nu weights 'w1_0,...,w1_d:w2_0,...,w2_{d-1}'");
  app->add_option("--threshold", f.threshold, "edges scoring below this are separation edges")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* app, Flags& f) {
  app->add_option("--solver", f.solver, "anneal or exhaustive")->capture_default_str();
  app->add_option("--sweeps", f.sweeps, "sweeps per restart")->capture_default_str();
  app->add_option("--restarts", f.restarts, "independent annealing restarts")->capture_default_str();
  app->add_option("--temp0", f.temp0, "initial temperature (default: largest |coefficient|)");
  app->add_option("--temp1", f.temp1, "final temperature")->capture_default_str();
  app->add_option("--seed", f.seed, "seed for all randomness")->capture_default_str();
  app->add_option("--jobs", f.jobs, "worker threads")->capture_default_str();
}

// Equal weight on every non-trivial term up to radius d.
ConnectivityWeights uniform_weights(std::size_t d) {
  if (d == 0) throw InvalidArgument("--radius must be at least 1");
  ConnectivityWeights w;
  const double share = 1.0 / static_cast<double>(2 * d);
  w.length1.assign(d + 1, share);
  w.length1[0] = 0.0;
  w.length2.assign(d, share);
  return w;
}

ConnectivityWeights resolve_weights(const Flags& f) {
  if (f.weights.empty()) return f.radius ? uniform_weights(*f.radius) : ConnectivityWeights{};
  ConnectivityWeights w = ConnectivityWeights::parse(f.weights);
  if (f.radius && *f.radius != w.radius()) {
    throw InvalidArgument("--radius " + std::to_string(*f.radius) + " disagrees with --weights (radius " +
                          std::to_string(w.radius()) + ")");
  }
  return w;
}

ScoreOptions score_options(const Flags& f) {
  ScoreOptions o;
  o.estimator = parse_estimator(f.estimator);
  o.weights = resolve_weights(f);
  o.threshold = f.threshold;
  o.jobs = f.jobs;
  return o;
}

SolverSettings solver_settings(const Flags& f) {
  SolverSettings s;
  s.kind = parse_solver(f.solver);
  s.initial_temp = f.temp0;
  s.final_temp = f.temp1;
  s.sweeps = f.sweeps;
  s.restarts = f.restarts;
  s.seed = f.seed;
  s.jobs = f.jobs;
  return s;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw InvalidArgument(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw InvalidArgument(std::string(flag) + ": no such file: " + path);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

json flags_json(const std::string& command, const Flags& f) {
  return {{"command", command},
          {"graph", f.graph},
          {"truth", f.truth},
          {"estimator", f.estimator},
          {"weights", resolve_weights(f).to_string()},
          {"radius", resolve_weights(f).radius()},
          {"threshold", f.threshold},
          {"assign", f.assign},
          {"penalty_weight", f.penalty_weight},
          {"solver", f.solver},
          {"sweeps", f.sweeps},
          {"restarts", f.restarts},
          {"temp0", f.temp0 ? json(*f.temp0) : json("auto")},
          {"temp1", f.temp1},
          {"seed", f.seed},
          {"jobs", f.jobs},
          {"out", f.out}};
}

std::string bits(const BitVector& x) {
  std::string s;
  for (auto b : x) s += b ? '1' : '0';
  return s;
}

std::optional<Partition> maybe_truth(const Flags& f, const Graph& graph) {
  if (f.truth.empty()) return std::nullopt;
  return load_partition(f.truth, graph);
}

int cmd_detect(const Flags& f, std::ostream& out, std::ostream& err) {
  require_file(f.graph, "--graph");
  if (!f.truth.empty()) require_file(f.truth, "--truth");
  DetectionConfig config;
  config.scoring = score_options(f);
  config.solver = solver_settings(f);
  config.assign = parse_assign(f.assign);
  config.penalty_weight = f.penalty_weight;
  const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  fs::create_directories(dir);
  const json echo = flags_json("detect", f);
  write_file(dir / "config.json", echo.dump(2) + '\n');

  const Graph graph = load_edge_list(f.graph);
  const std::optional<Partition> truth = maybe_truth(f, graph);
  if (config.scoring.estimator == EstimatorKind::Perfect && !truth) {
    throw InvalidArgument("--estimator perfect needs --truth");
  }
  try {
    const DetectionOutput result = detect(graph, config, truth ? &*truth : nullptr);
    std::ostringstream doc;
    write_detection_json(doc, result, config);
    write_file(dir / "detection.json", doc.str());
    save_partition(dir / "partition.txt", result.partition);
    json summary = {{"status", "ok"},
                    {"communities", result.partition.num_communities()},
                    {"sep_size", result.sep_set.size()},
                    {"out", dir.string()}};
    summary["modularity"] = graph.num_edges() > 0 ? json(modularity(graph, result.partition)) : json(nullptr);
    if (truth) summary["nmi"] = nmi(*truth, result.partition);
    out << summary.dump() << '\n';
    return kExitOk;
  } catch (const DegenerateOutcome& e) {
    const json doc = {{"status", "degenerate"},
                      {"error", e.what()},
                      {"sep_set", e.sep_set()},
                      {"config", echo}};
    write_file(dir / "detection.json", doc.dump(2) + '\n');
    err << "degenerate outcome: " << e.what() << " (" << e.sep_set().size() << " nodes)\n";
    out << json{{"status", "degenerate"}, {"sep_size", e.sep_set().size()}, {"out", dir.string()}}.dump()
        << '\n';
    return kExitDegenerate;
  }
}

struct GenerateFlags {
  std::size_t n = 105;
  std::size_t k = 3;
  double p_intra = 0.75;
  double p_inter = 0.05;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_generate(const GenerateFlags& g, std::ostream& out) {
  SbmConfig config;
  config.n = g.n;
  config.k = g.k;
  config.p_intra = g.p_intra;
  config.p_inter = g.p_inter;
  config.seed = g.seed;
  config.validate();
  const fs::path dir(g.out);
  fs::create_directories(dir);
  const SbmGraph sbm = generate_sbm(config);
  save_edge_list(dir / "graph.txt", sbm.graph);
  save_partition(dir / "truth.txt", sbm.truth);
  const json echo = {{"command", "generate"}, {"n", g.n},         {"k", g.k},
                     {"sizes", config.resolved_sizes()},          {"p_intra", g.p_intra},
                     {"p_inter", g.p_inter},  {"seed", g.seed},   {"out", g.out}};
  write_file(dir / "config.json", echo.dump(2) + '\n');
  out << json{{"status", "ok"},
              {"nodes", sbm.graph.num_nodes()},
              {"edges", sbm.graph.num_edges()},
              {"graph", (dir / "graph.txt").string()},
              {"truth", (dir / "truth.txt").string()}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_solve(const Flags& f, const std::string& qubo_path, std::ostream& out) {
  require_file(qubo_path, "--qubo");
  const SolverSettings settings = solver_settings(f);
  std::ifstream in(qubo_path);
  const QuboProblem problem = read_qubo(in);
  const SolverResult result = settings.solve(problem);
  json config = flags_json("solve", f);
  config["qubo"] = qubo_path;
  const json doc = {{"x", bits(result.best_x)},
                    {"energy", result.best_energy},
                    {"evaluations", result.evaluations},
                    {"energy_trace", result.energy_trace},
                    {"num_vars", problem.num_vars()},
                    {"config", config}};
  if (!f.out.empty()) write_file(f.out, doc.dump(2) + '\n');
  out << doc.dump() << '\n';
  return kExitOk;
}

int cmd_qubo(const Flags& f, std::ostream& out) {
  require_file(f.graph, "--graph");
  if (!f.truth.empty()) require_file(f.truth, "--truth");
  const Graph graph = load_edge_list(f.graph);
  const std::optional<Partition> truth = maybe_truth(f, graph);
  const EdgeScoreMap scores = score_all_edges(graph, score_options(f), truth ? &*truth : nullptr);
  const QuboProblem problem = build_separation_qubo(graph, scores);
  std::ostringstream text;
  write_qubo(text, problem);
  if (f.out.empty()) {
    out << text.str();
  } else {
    write_file(f.out, text.str());
    out << json{{"status", "ok"}, {"num_vars", problem.num_vars()},
                {"quadratic_terms", problem.quadratic().size()}, {"out", f.out}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

int cmd_score(const Flags& f, std::ostream& out) {
  require_file(f.graph, "--graph");
  if (!f.truth.empty()) require_file(f.truth, "--truth");
  const Graph graph = load_edge_list(f.graph);
  const std::optional<Partition> truth = maybe_truth(f, graph);
  const EdgeScoreMap scores = score_all_edges(graph, score_options(f), truth ? &*truth : nullptr);
  std::ostringstream csv;
  write_scores_csv(csv, graph, scores);
  if (f.out.empty()) {
    out << csv.str();
    return kExitOk;
  }
  write_file(f.out, csv.str());
  json summary = {{"status", "ok"},
                  {"edges", graph.num_edges()},
                  {"separation_edges", scores.num_separation_edges()},
                  {"out", f.out}};
  if (truth) {
    const auto r2 = r_squared(scores, *truth, graph);
    summary["r_squared"] = r2 ? json(*r2) : json(nullptr);
  }
  out << summary.dump() << '\n';
  return kExitOk;
}

struct ReproduceFlags {
  std::string suite;
  std::string out;
  std::string data;
  std::uint64_t seed = 1;
  std::size_t runs = 10;
  bool full_scale = false;
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  double p_inter = 0.05;
};

int cmd_reproduce(const ReproduceFlags& r, const Flags& f, std::ostream& out, std::ostream& err) {
  ExperimentOptions options;
  options.suite = parse_suite(r.suite);
  if (r.out.empty()) throw InvalidArgument("--out is required");
  if (options.suite == Suite::RealWorld && r.data.empty()) {
    throw InvalidArgument("--suite realworld needs --data <dir> holding best_known.json and the "
                          "edge lists (see scripts/fetch_datasets.sh)");
  }
  if (r.full_scale) options.use_full_scale();
  if (!r.full_scale || r.runs != 10) {
    options.seeds.clear();
    for (std::size_t i = 0; i < r.runs; ++i) options.seeds.push_back(r.seed + i);
  }
  if (r.n) options.n = *r.n;
  if (r.k) options.k = *r.k;
  options.p_inter = r.p_inter;
  options.data_dir = r.data;
  options.weights = resolve_weights(f);
  options.threshold = f.threshold;
  options.sweeps = f.sweeps;
  options.restarts = f.restarts;
  options.final_temp = f.temp1;
  options.jobs = f.jobs;

  const ExperimentReport report = run_experiment(options);
  write_report(report, r.out);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  json groups = json::array();
  for (const auto& g : report.groups) {
    json entry = {{"name", g.name}};
    if (g.nmi) entry["median_nmi"] = g.nmi->median;
    if (g.mod_fraction) entry["median_mod_fraction"] = g.mod_fraction->median;
    if (g.r_squared) entry["median_r_squared"] = g.r_squared->median;
    if (g.size_deviation) entry["median_size_deviation"] = g.size_deviation->median;
    groups.push_back(entry);
  }
  out << json{{"status", "ok"}, {"suite", r.suite}, {"runs", report.records.size()},
              {"groups", groups}, {"out", r.out}}
             .dump()
      << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community detection through separation-node QUBOs"};
  app.name("sepcd");
  app.require_subcommand(1);
  app.set_version_flag("--version", "sepcd 0.3.0");

  Flags flags;
  GenerateFlags gen;
  ReproduceFlags rep;
  std::string qubo_path;

  auto* detect_cmd = app.add_subcommand("detect", "detect communities in an edge-list graph");
  detect_cmd->add_option("--graph", flags.graph, "edge-list file")->required();
  detect_cmd->add_option("--truth", flags.truth, "ground-truth partition (node community lines)");
  detect_cmd->add_option("--assign", flags.assign, "greedy or clamped")->capture_default_str();
  detect_cmd->add_option("--penalty-weight", flags.penalty_weight,
                         "one-hot penalty of the clamped assignment")
      ->capture_default_str();
  detect_cmd->add_option("--out", flags.out, "output directory")->capture_default_str();
  add_scoring_flags(detect_cmd, flags);
  add_solver_flags(detect_cmd, flags);

  auto* generate_cmd = app.add_subcommand("generate", "sample a stochastic block model graph");
  generate_cmd->add_option("--n", gen.n, "nodes")->capture_default_str();
  generate_cmd->add_option("--k", gen.k, "communities")->capture_default_str();
  generate_cmd->add_option("--p-intra", gen.p_intra, "intra-community edge probability")
      ->capture_default_str();
  generate_cmd->add_option("--p-inter", gen.p_inter, "inter-community edge probability")
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  generate_cmd->add_option("--out", gen.out, "output directory")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "minimize a QUBO in sparse text format");
  solve_cmd->add_option("--qubo", qubo_path, "QUBO file")->required();
  solve_cmd->add_option("--out", flags.out, "write the result JSON here as well");
  add_solver_flags(solve_cmd, flags);

  auto* qubo_cmd = app.add_subcommand("qubo", "write the separation QUBO of a graph");
  qubo_cmd->add_option("--graph", flags.graph, "edge-list file")->required();
  qubo_cmd->add_option("--truth", flags.truth, "ground-truth partition");
  qubo_cmd->add_option("--out", flags.out, "output file (default: stdout)");
  add_scoring_flags(qubo_cmd, flags);

  auto* score_cmd = app.add_subcommand("score", "score every edge as CSV u,v,score,label");
  score_cmd->add_option("--graph", flags.graph, "edge-list file")->required();
  score_cmd->add_option("--truth", flags.truth, "ground-truth partition");
  score_cmd->add_option("--out", flags.out, "output file (default: stdout)");
  add_scoring_flags(score_cmd, flags);

  auto* reproduce_cmd = app.add_subcommand("reproduce", "run an experiment suite");
  reproduce_cmd->add_option("--suite", rep.suite,
                            "sbm-perfect, sbm-nu-greedy, sbm-nu-anneal, realworld, estimator-r2")
      ->required();
  reproduce_cmd->add_option("--out", rep.out, "report directory")->required();
  reproduce_cmd->add_option("--data", rep.data, "dataset directory (realworld suite)");
  reproduce_cmd->add_option("--seed", rep.seed, "first seed")->capture_default_str();
  reproduce_cmd->add_option("--runs", rep.runs, "seeds per group")->capture_default_str();
  reproduce_cmd->add_flag("--full-scale", rep.full_scale, "n=250, k=7, 50 seeds");
  reproduce_cmd->add_option("--n", rep.n, "SBM nodes");
  reproduce_cmd->add_option("--k", rep.k, "SBM communities");
  reproduce_cmd->add_option("--p-inter", rep.p_inter, "SBM inter-community probability")
      ->capture_default_str();
  reproduce_cmd->add_option("--weights", flags.weights, "nu weights");
  reproduce_cmd->add_option("--radius", flags.radius, "nu radius");
  reproduce_cmd->add_option("--threshold", flags.threshold, "separation threshold")
      ->capture_default_str();
  reproduce_cmd->add_option("--sweeps", flags.sweeps, "sweeps per restart")->capture_default_str();
  reproduce_cmd->add_option("--restarts", flags.restarts, "annealing restarts")
      ->capture_default_str();
  reproduce_cmd->add_option("--temp1", flags.temp1, "final temperature")->capture_default_str();
  reproduce_cmd->add_option("--jobs", flags.jobs, "concurrent runs")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*detect_cmd) return cmd_detect(flags, out, err);
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*solve_cmd) return cmd_solve(flags, qubo_path, out);
    if (*qubo_cmd) return cmd_qubo(flags, out);
    if (*score_cmd) return cmd_score(flags, out);
    if (*reproduce_cmd) return cmd_reproduce(rep, flags, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace sepcd::cli
