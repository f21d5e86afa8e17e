#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sepcd/estimate.hpp"

namespace sepcd {

enum class Suite { SbmPerfect, SbmNuGreedy, SbmNuAnneal, RealWorld, EstimatorR2 };
std::string_view to_string(Suite suite);
// Throws InvalidArgument for unknown names.
Suite parse_suite(std::string_view name);
std::vector<Suite> all_suites();

// One SBM difficulty level: intra-community edge probability plus a label.
struct Difficulty {
  std::string name;
  double p_intra = 0.75;
};

// easy 0.75, medium 0.625, hard 0.5, extreme 0.4.
std::vector<Difficulty> default_ladder();

struct ExperimentOptions {
  Suite suite = Suite::SbmPerfect;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t n = 105;
  std::size_t k = 3;
  double p_inter = 0.05;
  std::vector<Difficulty> ladder = default_ladder();
  std::filesystem::path data_dir;  // realworld suite only
  ConnectivityWeights weights{};
  double threshold = 0.0;
  std::uint32_t sweeps = 1000;
  std::uint32_t restarts = 10;
  double final_temp = 1e-3;
  // Effort of the perfect-estimator runs that define the best-known
  // separation-set size.
  std::uint32_t reference_sweeps = 2000;
  std::uint32_t reference_restarts = 40;
  unsigned jobs = 1;

  // n = 250, k = 7, seeds 1..50.
  void use_full_scale();
};

// One CSV row. Missing quantities are left empty in the CSV.
struct ExperimentRecord {
  std::string suite;
  std::string graph_id;
  std::uint64_t seed = 0;
  std::string difficulty;
  std::optional<double> nmi;
  std::optional<double> modularity;
  std::optional<double> best_known_modularity;
  std::optional<double> mod_fraction;
  std::optional<std::size_t> sep_size;
  std::optional<std::size_t> best_sep_size;
  std::optional<double> size_deviation;
  std::optional<double> r_squared;
  double runtime_ms = 0.0;
};

struct Quartiles {
  std::size_t count = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Linear interpolation between order statistics. Empty input gives count 0.
Quartiles quartiles(std::vector<double> values);

// Aggregates of one difficulty (SBM suites) or one dataset (realworld).
struct ExperimentGroup {
  std::string name;
  std::optional<Quartiles> nmi;
  std::optional<Quartiles> mod_fraction;
  std::optional<Quartiles> size_deviation;
  std::optional<Quartiles> r_squared;
  std::optional<Quartiles> modularity;
};

struct ExperimentReport {
  ExperimentOptions options;
  std::vector<ExperimentRecord> records;  // ordered by group, then seed
  std::vector<ExperimentGroup> groups;
  std::vector<std::string> warnings;
};

// Runs every (group, seed) combination of the suite, concurrently up to
// options.jobs. Rows do not depend on jobs. Throws InvalidArgument for the
// realworld suite when the data directory or its best_known.json is missing.
ExperimentReport run_experiment(const ExperimentOptions& options);

inline constexpr std::string_view kCsvHeader =
    "suite,graph_id,seed,difficulty,nmi,modularity,best_known_modularity,mod_fraction,"
    "sep_size,best_sep_size,size_deviation,r_squared,runtime_ms";

std::string csv_row(const ExperimentRecord& record);

// Writes results.csv, summary.json, config.json and summary.svg into dir.
// Existing rows of results.csv with the same (suite, graph_id, seed) key are
// replaced in place; other rows are kept and new ones appended.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

void write_summary_json(std::ostream& out, const ExperimentReport& report);
std::string options_json(const ExperimentOptions& options);

// Box plot of the suite's headline metric per group, as a standalone SVG.
void write_summary_svg(std::ostream& out, const ExperimentReport& report);

// Real-world dataset described by <data_dir>/best_known.json.
struct DatasetInfo {
  std::string name;
  std::filesystem::path graph;
  std::optional<std::filesystem::path> truth;
  std::optional<std::filesystem::path> best_partition;
  double best_modularity = 0.0;
};

std::vector<DatasetInfo> load_dataset_index(const std::filesystem::path& data_dir);

}  // namespace sepcd
