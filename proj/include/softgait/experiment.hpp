#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softgait/archive.hpp"
#include "softgait/config.hpp"

namespace softgait {

enum class Algorithm { kCma, kQda };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Per-trial seed mixed from the master seed, terrain, algorithm and trial
/// index, so any single trial can be re-run in isolation.
std::uint64_t trial_seed(std::uint64_t master_seed, TerrainKind terrain, Algorithm algorithm,
                         int trial);

struct TransferEntry {
  TerrainKind terrain = TerrainKind::kFlat;
  double best_fitness = 0.0;
  int evaluations = 0;
  int failed_evaluations = 0;
  bool operator==(const TransferEntry&) const = default;
};

struct TrialRecord {
  TerrainKind terrain = TerrainKind::kFlat;
  Algorithm algorithm = Algorithm::kCma;
  int trial = 0;
  std::uint64_t seed = 0;
  int budget = 0;
  int batch_size = 0;
  bool failed = false;
  std::string error;

  int training_evaluations = 0;
  int training_failed_evaluations = 0;
  double training_best = 0.0;
  // CMA-ES: best-ever candidate. QDA: fittest elite of the final archive.
  std::optional<Elite> champion;
  std::optional<Archive> archive;  // QDA only
  std::vector<TransferEntry> transfers;

  bool operator==(const TrialRecord&) const = default;
};

/// Line-delimited JSON with a versioned header line.
void write_record(std::ostream& os, const TrialRecord& record);
TrialRecord read_record(std::istream& is);
std::filesystem::path record_path(const std::filesystem::path& root, TerrainKind terrain,
                                  Algorithm algorithm, int trial);
void save_record(const std::filesystem::path& root, const TrialRecord& record);
TrialRecord load_record(const std::filesystem::path& file);
/// All trial records below root, sorted by (terrain, algorithm, trial).
std::vector<TrialRecord> load_records(const std::filesystem::path& root);

/// Runs ask / evaluate / tell until `budget` evaluations are spent. Optimizer
/// breakdowns mark the record failed instead of throwing.
TrialRecord run_optimization_phase(TerrainKind terrain, Algorithm algorithm, int trial,
                                   std::uint64_t seed, int budget,
                                   const ExperimentConfig& config, int workers = 1);

/// Re-evaluates the champion (CMA-ES) or every elite (QDA) on each terrain in
/// `targets`, recording the best fitness per terrain. No re-training.
void run_transfer_phase(TrialRecord& record, std::span<const TerrainKind> targets,
                        const ExperimentConfig& config, int workers = 1);

/// Row = training terrain, column = transfer terrain. Cells hold the mean over
/// successful trials of (transfer best - training best); the diagonal and
/// cells without data are empty.
struct TransferMatrix {
  std::vector<TerrainKind> terrains;
  std::vector<std::vector<std::optional<double>>> mean_delta;
  std::vector<std::vector<int>> counts;

  const std::optional<double>& at(TerrainKind train, TerrainKind target) const;
};

struct TrainingSummary {
  Algorithm algorithm = Algorithm::kCma;
  TerrainKind terrain = TerrainKind::kFlat;
  int successful_trials = 0;
  int failed_trials = 0;
  std::optional<double> mean_training_best;
};

struct DistributionRow {
  Algorithm algorithm = Algorithm::kCma;
  TerrainKind train = TerrainKind::kFlat;
  TerrainKind target = TerrainKind::kFlat;  // == train for the training score
  int trial = 0;
  double fitness = 0.0;
  double delta = 0.0;
};

struct AggregateResult {
  TransferMatrix cma;
  TransferMatrix qda;
  std::vector<TrainingSummary> training;
  std::vector<DistributionRow> distribution;

  const TransferMatrix& matrix(Algorithm a) const { return a == Algorithm::kCma ? cma : qda; }
  const TrainingSummary* summary(Algorithm a, TerrainKind t) const;
};

AggregateResult aggregate(std::span<const TrialRecord> records,
                          std::span<const TerrainKind> terrains);
/// Writes matrix_cma.csv, matrix_qda.csv, training_summary.csv and
/// distributions.csv into dir.
void write_aggregate(const AggregateResult& result, const std::filesystem::path& dir);

/// The whole protocol: every terrain x trial x algorithm is optimised, then
/// transferred onto every other configured terrain; records, manifest and
/// aggregate CSVs land under out_dir.
AggregateResult run_full(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         int workers);

/// Deterministic description of a run: config, master seed, derived seeds.
nlohmann::json make_manifest(const ExperimentConfig& config);

}  // namespace softgait
