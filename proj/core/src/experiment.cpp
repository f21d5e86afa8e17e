#include "sepcd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <type_traits>

#include <json.hpp>

#include "sepcd/error.hpp"
#include "sepcd/graph_io.hpp"
#include "sepcd/metrics.hpp"
#include "sepcd/pipeline.hpp"
#include "sepcd/sbm.hpp"

namespace sepcd {
namespace {

using nlohmann::json;

// splitmix64 finalizer; keeps the graph and solver streams of one seed apart.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string format_number(double value, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

bool is_sbm_suite(Suite suite) { return suite != Suite::RealWorld; }

// Work item: one seed in one group (difficulty or dataset).
struct Task {
  std::size_t group = 0;
  std::uint64_t seed = 0;
};

class Runner {
 public:
  Runner(const ExperimentOptions& options, std::vector<DatasetInfo> datasets)
      : options_(options), datasets_(std::move(datasets)) {}

  std::size_t num_groups() const {
    return is_sbm_suite(options_.suite) ? options_.ladder.size() : datasets_.size();
  }

  std::string group_name(std::size_t g) const {
    return is_sbm_suite(options_.suite) ? options_.ladder[g].name : datasets_[g].name;
  }

  ExperimentRecord run(const Task& task, std::vector<std::string>& warnings) const {
    const auto start = std::chrono::steady_clock::now();
    ExperimentRecord rec = is_sbm_suite(options_.suite) ? run_sbm(task, warnings)
                                                        : run_realworld(task, warnings);
    rec.suite = std::string(to_string(options_.suite));
    rec.seed = task.seed;
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
  }

 private:
  DetectionConfig pipeline_config(EstimatorKind estimator, AssignMethod assign,
                                  std::uint64_t seed) const {
    DetectionConfig c;
    c.scoring.estimator = estimator;
    c.scoring.weights = options_.weights;
    c.scoring.threshold = estimator == EstimatorKind::Perfect ? 0.0 : options_.threshold;
    c.solver.sweeps = options_.sweeps;
    c.solver.restarts = options_.restarts;
    c.solver.final_temp = options_.final_temp;
    c.solver.seed = derive_seed(seed, 1);
    c.assign = assign;
    return c;
  }

  // Smallest separation set found by a high-effort perfect-estimator run.
  std::size_t reference_sep_size(const Graph& graph, const Partition& truth,
                                 std::uint64_t seed) const {
    DetectionConfig c = pipeline_config(EstimatorKind::Perfect, AssignMethod::Greedy, seed);
    c.solver.sweeps = options_.reference_sweeps;
    c.solver.restarts = options_.reference_restarts;
    c.solver.seed = derive_seed(seed, 2);
    const QuboProblem qubo = build_separation_qubo(graph, perfect_estimator(graph, truth));
    return flagged_nodes(c.solver.solve(qubo).best_x).size();
  }

  void fill_detection(ExperimentRecord& rec, const Graph& graph, const Partition* truth,
                      const DetectionConfig& config, std::uint64_t seed,
                      std::vector<std::string>& warnings) const {
    try {
      const DetectionOutput out = detect(graph, config, truth);
      rec.modularity = modularity(graph, out.partition);
      rec.sep_size = out.sep_set.size();
      if (truth) rec.nmi = nmi(*truth, out.partition);
      if (config.scoring.estimator != EstimatorKind::Perfect && truth) {
        rec.r_squared = r_squared(out.scores, *truth, graph);
      }
    } catch (const DegenerateOutcome& e) {
      rec.sep_size = e.sep_set().size();
      warnings.push_back(rec.graph_id + ": degenerate outcome, every node flagged");
    }
    if (truth && rec.sep_size) {
      rec.best_sep_size = reference_sep_size(graph, *truth, seed);
      if (*rec.best_sep_size > 0) rec.size_deviation = size_deviation(*rec.sep_size, *rec.best_sep_size);
    }
    if (rec.modularity && rec.best_known_modularity && *rec.best_known_modularity > 0.0) {
      rec.mod_fraction = *rec.modularity / *rec.best_known_modularity;
    }
  }

  ExperimentRecord run_sbm(const Task& task, std::vector<std::string>& warnings) const {
    const Difficulty& level = options_.ladder[task.group];
    SbmConfig sbm;
    sbm.n = options_.n;
    sbm.k = options_.k;
    sbm.p_intra = level.p_intra;
    sbm.p_inter = options_.p_inter;
    sbm.seed = task.seed;
    const SbmGraph g = generate_sbm(sbm);

    ExperimentRecord rec;
    rec.graph_id = "sbm-n" + std::to_string(sbm.n) + "-k" + std::to_string(sbm.k) + "-pin" +
                   format_number(sbm.p_intra, "%g") + "-pout" + format_number(sbm.p_inter, "%g") +
                   "-s" + std::to_string(task.seed);
    rec.difficulty = level.name;
    if (g.graph.num_edges() > 0) rec.best_known_modularity = modularity(g.graph, g.truth);

    switch (options_.suite) {
      case Suite::SbmPerfect:
        fill_detection(rec, g.graph, &g.truth,
                       pipeline_config(EstimatorKind::Perfect, AssignMethod::Greedy, task.seed),
                       task.seed, warnings);
        break;
      case Suite::SbmNuGreedy:
        fill_detection(rec, g.graph, &g.truth,
                       pipeline_config(EstimatorKind::NeighborhoodConnectivity,
                                       AssignMethod::Greedy, task.seed),
                       task.seed, warnings);
        break;
      case Suite::SbmNuAnneal:
        fill_detection(rec, g.graph, &g.truth,
                       pipeline_config(EstimatorKind::NeighborhoodConnectivity,
                                       AssignMethod::Clamped, task.seed),
                       task.seed, warnings);
        break;
      case Suite::EstimatorR2: {
        ScoreOptions opts;
        opts.weights = options_.weights;
        opts.threshold = options_.threshold;
        rec.r_squared = r_squared(score_all_edges(g.graph, opts), g.truth, g.graph);
        break;
      }
      case Suite::RealWorld:
        break;
    }
    return rec;
  }

  ExperimentRecord run_realworld(const Task& task, std::vector<std::string>& warnings) const {
    const DatasetInfo& info = datasets_[task.group];
    const Graph graph = load_edge_list(info.graph);
    std::optional<Partition> truth;
    if (info.truth) truth = load_partition(*info.truth, graph);

    ExperimentRecord rec;
    rec.graph_id = info.name;
    rec.difficulty = "real";
    rec.best_known_modularity = info.best_modularity;
    fill_detection(rec, graph, truth ? &*truth : nullptr,
                   pipeline_config(EstimatorKind::NeighborhoodConnectivity, AssignMethod::Greedy,
                                   task.seed),
                   task.seed, warnings);
    return rec;
  }

  const ExperimentOptions& options_;
  std::vector<DatasetInfo> datasets_;
};

std::optional<Quartiles> summarize(const std::vector<ExperimentRecord>& records,
                                   std::optional<double> ExperimentRecord::*field) {
  std::vector<double> values;
  for (const auto& r : records) {
    if (r.*field) values.push_back(*(r.*field));
  }
  if (values.empty()) return std::nullopt;
  return quartiles(std::move(values));
}

json quartiles_json(const std::optional<Quartiles>& q) {
  if (!q) return nullptr;
  return {{"count", q->count}, {"min", q->min}, {"q1", q->q1},
          {"median", q->median}, {"q3", q->q3}, {"max", q->max}};
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*v);
  } else {
    return std::to_string(*v);
  }
}

// "suite,graph_id,seed" prefix of a CSV row.
std::string row_key(const std::string& row) {
  std::size_t pos = 0;
  for (int commas = 0; commas < 3; ++commas) {
    pos = row.find(',', pos);
    if (pos == std::string::npos) return row;
    ++pos;
  }
  return row.substr(0, pos - 1);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::SbmPerfect: return "sbm-perfect";
    case Suite::SbmNuGreedy: return "sbm-nu-greedy";
    case Suite::SbmNuAnneal: return "sbm-nu-anneal";
    case Suite::RealWorld: return "realworld";
    case Suite::EstimatorR2: return "estimator-r2";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : all_suites()) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown suite '" + std::string(name) +
                        "' (sbm-perfect, sbm-nu-greedy, sbm-nu-anneal, realworld, estimator-r2)");
}

std::vector<Suite> all_suites() {
  return {Suite::SbmPerfect, Suite::SbmNuGreedy, Suite::SbmNuAnneal, Suite::RealWorld,
          Suite::EstimatorR2};
}

std::vector<Difficulty> default_ladder() {
  return {{"easy", 0.75}, {"medium", 0.625}, {"hard", 0.5}, {"extreme", 0.4}};
}

void ExperimentOptions::use_full_scale() {
  n = 250;
  k = 7;
  seeds.clear();
  for (std::uint64_t s = 1; s <= 50; ++s) seeds.push_back(s);
}

Quartiles quartiles(std::vector<double> values) {
  Quartiles q;
  q.count = values.size();
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.min = values.front();
  q.max = values.back();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  return q;
}

std::vector<DatasetInfo> load_dataset_index(const std::filesystem::path& data_dir) {
  const auto index = data_dir / "best_known.json";
  std::ifstream in(index);
  if (data_dir.empty() || !in) {
    throw InvalidArgument("realworld suite needs a data directory with best_known.json (looked for " +
                          index.string() + "); see scripts/fetch_datasets.sh");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(index.string() + ": " + e.what(), 0);
  }
  std::vector<DatasetInfo> out;
  for (const auto& entry : doc.at("datasets")) {
    DatasetInfo info;
    info.name = entry.at("name").get<std::string>();
    info.graph = data_dir / entry.at("graph").get<std::string>();
    if (entry.contains("truth")) info.truth = data_dir / entry["truth"].get<std::string>();
    if (entry.contains("best_partition")) {
      info.best_partition = data_dir / entry["best_partition"].get<std::string>();
    }
    info.best_modularity = entry.at("best_modularity").get<double>();
    if (!std::filesystem::exists(info.graph)) {
      throw InvalidArgument("dataset file missing: " + info.graph.string());
    }
    out.push_back(std::move(info));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentOptions& options) {
  options.weights.validate();
  if (options.seeds.empty()) throw InvalidArgument("no seeds given");
  std::vector<DatasetInfo> datasets;
  if (options.suite == Suite::RealWorld) datasets = load_dataset_index(options.data_dir);

  ExperimentReport report;
  report.options = options;
  const Runner runner(report.options, std::move(datasets));

  std::vector<Task> tasks;
  for (std::size_t g = 0; g < runner.num_groups(); ++g) {
    for (std::uint64_t seed : options.seeds) tasks.push_back({g, seed});
  }
  report.records.resize(tasks.size());
  std::vector<std::vector<std::string>> warnings(tasks.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        report.records[i] = runner.run(tasks[i], warnings[i]);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = std::clamp<unsigned>(options.jobs, 1U, static_cast<unsigned>(tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& w : warnings) report.warnings.insert(report.warnings.end(), w.begin(), w.end());
  for (std::size_t g = 0; g < runner.num_groups(); ++g) {
    std::vector<ExperimentRecord> members;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].group == g) members.push_back(report.records[i]);
    }
    ExperimentGroup group;
    group.name = runner.group_name(g);
    group.nmi = summarize(members, &ExperimentRecord::nmi);
    group.mod_fraction = summarize(members, &ExperimentRecord::mod_fraction);
    group.size_deviation = summarize(members, &ExperimentRecord::size_deviation);
    group.r_squared = summarize(members, &ExperimentRecord::r_squared);
    group.modularity = summarize(members, &ExperimentRecord::modularity);
    report.groups.push_back(std::move(group));
  }
  return report;
}

std::string csv_row(const ExperimentRecord& r) {
  std::string row = r.suite + ',' + r.graph_id + ',' + std::to_string(r.seed) + ',' + r.difficulty;
  for (const std::string& field :
       {optional_field(r.nmi), optional_field(r.modularity), optional_field(r.best_known_modularity),
        optional_field(r.mod_fraction), optional_field(r.sep_size), optional_field(r.best_sep_size),
        optional_field(r.size_deviation), optional_field(r.r_squared),
        format_number(r.runtime_ms, "%.3f")}) {
    row += ',';
    row += field;
  }
  return row;
}

std::string options_json(const ExperimentOptions& o) {
  json ladder = json::array();
  for (const auto& d : o.ladder) ladder.push_back({{"name", d.name}, {"p_intra", d.p_intra}});
  const json doc = {
      {"suite", to_string(o.suite)},
      {"seeds", o.seeds},
      {"n", o.n},
      {"k", o.k},
      {"p_inter", o.p_inter},
      {"ladder", ladder},
      {"data_dir", o.data_dir.string()},
      {"weights", o.weights.to_string()},
      {"radius", o.weights.radius()},
      {"threshold", o.threshold},
      {"sweeps", o.sweeps},
      {"restarts", o.restarts},
      {"temp1", o.final_temp},
      {"reference_sweeps", o.reference_sweeps},
      {"reference_restarts", o.reference_restarts},
      {"jobs", o.jobs},
  };
  return doc.dump(2);
}

void write_summary_json(std::ostream& out, const ExperimentReport& report) {
  json groups = json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"name", g.name},
                      {"nmi", quartiles_json(g.nmi)},
                      {"mod_fraction", quartiles_json(g.mod_fraction)},
                      {"size_deviation", quartiles_json(g.size_deviation)},
                      {"r_squared", quartiles_json(g.r_squared)},
                      {"modularity", quartiles_json(g.modularity)}});
  }
  const json doc = {{"suite", to_string(report.options.suite)},
                    {"config", json::parse(options_json(report.options))},
                    {"runs", report.records.size()},
                    {"groups", groups},
                    {"warnings", report.warnings}};
  out << doc.dump(2) << '\n';
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / "results.csv";

  std::vector<std::string> rows;
  if (std::ifstream existing(csv_path); existing) {
    std::string line;
    std::getline(existing, line);
    if (line != kCsvHeader) throw Error(csv_path.string() + " has an unexpected header");
    while (std::getline(existing, line)) {
      if (!line.empty()) rows.push_back(line);
    }
  }
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < rows.size(); ++i) position[row_key(rows[i])] = i;
  for (const auto& record : report.records) {
    const std::string row = csv_row(record);
    const auto it = position.find(row_key(row));
    if (it != position.end()) {
      rows[it->second] = row;
    } else {
      position[row_key(row)] = rows.size();
      rows.push_back(row);
    }
  }
  std::string csv = std::string(kCsvHeader) + '\n';
  for (const auto& row : rows) csv += row + '\n';
  write_text(csv_path, csv);

  std::ostringstream summary;
  write_summary_json(summary, report);
  write_text(dir / "summary.json", summary.str());
  write_text(dir / "config.json", options_json(report.options) + '\n');
  std::ostringstream svg;
  write_summary_svg(svg, report);
  write_text(dir / "summary.svg", svg.str());
}

}  // namespace sepcd
