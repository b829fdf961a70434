#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "softgait/cmaes.hpp"
#include "softgait/evaluation.hpp"
#include "softgait/qda.hpp"
#include "softgait/terrain.hpp"

namespace softgait {

/// Every tunable constant of a run. Serialized as JSON; unknown keys and type
/// mismatches are rejected with the dotted path of the offending field.
struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  std::vector<TerrainKind> terrains{std::begin(kAllTerrains), std::end(kAllTerrains)};
  int trials = 30;
  int budget = 2000;  // evaluations per optimisation run
  int batch_size = 20;
  EvalConfig eval{};
  TerrainOptions terrain{};
  CmaOptions cma{};
  QdaOptions qda = default_qda();

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;

  /// Three terrains, ten trials, 600 evaluations.
  static ExperimentConfig desk_preset();
  /// Descriptor bounds from a 1000-genotype uniform pilot on flat ground,
  /// [0, 99th percentile] per axis.
  static ArchiveBounds default_bounds();

 private:
  static QdaOptions default_qda();
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

std::vector<TerrainKind> parse_terrain_list(const std::string& csv);

}  // namespace softgait
