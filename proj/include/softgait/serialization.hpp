#pragma once

// JSON mappings for the value types that appear in config and record files.

#include "json.hpp"

#include "softgait/archive.hpp"
#include "softgait/evaluation.hpp"
#include "softgait/morphology.hpp"

namespace softgait {

nlohmann::json to_json(const Genotype& g);
Genotype genotype_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GaitResult& r);
GaitResult gait_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ArchiveBounds& b);
ArchiveBounds archive_bounds_from_json(const nlohmann::json& j);

}  // namespace softgait
