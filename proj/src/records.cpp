#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "softgait/errors.hpp"
#include "softgait/experiment.hpp"
#include "softgait/serialization.hpp"

namespace softgait {

using nlohmann::json;

namespace {
constexpr int kRecordVersion = 1;
}

std::string_view algorithm_name(Algorithm a) { return a == Algorithm::kCma ? "cma" : "qda"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "cma" || name == "cma-es") return Algorithm::kCma;
  if (name == "qda" || name == "qd") return Algorithm::kQda;
  throw ConfigError("algorithm: expected 'cma' or 'qda', got '" + std::string(name) + "'");
}

void write_record(std::ostream& os, const TrialRecord& rec) {
  json header{{"format", "softgait-trial"},
              {"version", kRecordVersion},
              {"terrain", terrain_name(rec.terrain)},
              {"algorithm", algorithm_name(rec.algorithm)},
              {"trial", rec.trial},
              {"seed", rec.seed},
              {"budget", rec.budget},
              {"batch_size", rec.batch_size},
              {"failed", rec.failed},
              {"error", rec.error}};
  os << header.dump() << '\n';

  json training{{"kind", "training"},
                {"evaluations", rec.training_evaluations},
                {"failed_evaluations", rec.training_failed_evaluations},
                {"best_fitness", rec.training_best},
                {"champion", nullptr}};
  if (rec.champion) {
    training["champion"] = {{"genes", to_json(rec.champion->genotype)},
                            {"result", to_json(rec.champion->result)}};
  }
  os << training.dump() << '\n';

  if (rec.archive) rec.archive->write_jsonl(os);

  for (const TransferEntry& t : rec.transfers) {
    json line{{"kind", "transfer"},
              {"terrain", terrain_name(t.terrain)},
              {"best_fitness", t.best_fitness},
              {"evaluations", t.evaluations},
              {"failed_evaluations", t.failed_evaluations}};
    os << line.dump() << '\n';
  }
}

TrialRecord read_record(std::istream& is) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ValidationError("trial record: empty file");

  TrialRecord rec;
  const json header = json::parse(lines[0]);
  if (header.value("format", "") != "softgait-trial") {
    throw ValidationError("trial record: not a softgait trial record");
  }
  if (header.value("version", 0) != kRecordVersion) {
    throw ValidationError("trial record: unsupported version");
  }
  rec.terrain = parse_terrain(header.at("terrain").get<std::string>());
  rec.algorithm = parse_algorithm(header.at("algorithm").get<std::string>());
  rec.trial = header.at("trial").get<int>();
  rec.seed = header.at("seed").get<std::uint64_t>();
  rec.budget = header.at("budget").get<int>();
  rec.batch_size = header.at("batch_size").get<int>();
  rec.failed = header.at("failed").get<bool>();
  rec.error = header.at("error").get<std::string>();

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const json j = json::parse(lines[i]);
    const std::string kind = j.value("kind", "");
    if (kind == "training") {
      rec.training_evaluations = j.at("evaluations").get<int>();
      rec.training_failed_evaluations = j.at("failed_evaluations").get<int>();
      rec.training_best = j.at("best_fitness").get<double>();
      if (!j.at("champion").is_null()) {
        const json& c = j.at("champion");
        rec.champion = Elite{genotype_from_json(c.at("genes")), gait_result_from_json(c.at("result"))};
      }
    } else if (kind == "archive") {
      const auto count = j.at("occupancy").get<std::size_t>();
      if (i + count >= lines.size()) {
        throw ValidationError("trial record: truncated archive");
      }
      std::stringstream block;
      for (std::size_t k = 0; k <= count; ++k) block << lines[i + k] << '\n';
      rec.archive = Archive::read_jsonl(block);
      i += count;
    } else if (kind == "transfer") {
      rec.transfers.push_back({parse_terrain(j.at("terrain").get<std::string>()),
                               j.at("best_fitness").get<double>(), j.at("evaluations").get<int>(),
                               j.at("failed_evaluations").get<int>()});
    } else {
      throw ValidationError("trial record: unknown line kind '" + kind + "'");
    }
  }
  return rec;
}

std::filesystem::path record_path(const std::filesystem::path& root, TerrainKind terrain,
                                  Algorithm algorithm, int trial) {
  return root / std::string(terrain_name(terrain)) / std::string(algorithm_name(algorithm)) /
         ("trial_" + std::to_string(trial) + ".jsonl");
}

void save_record(const std::filesystem::path& root, const TrialRecord& record) {
  const auto path = record_path(root, record.terrain, record.algorithm, record.trial);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trial record " + path.string());
  write_record(out, record);
}

TrialRecord load_record(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open trial record " + file.string());
  try {
    return read_record(in);
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

std::vector<TrialRecord> load_records(const std::filesystem::path& root) {
  std::vector<TrialRecord> records;
  if (!std::filesystem::exists(root)) return records;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("trial_", 0) != 0 || entry.path().extension() != ".jsonl") continue;
    records.push_back(load_record(entry.path()));
  }
  auto terrain_rank = [](TerrainKind t) { return static_cast<int>(t); };
  std::sort(records.begin(), records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
    if (a.terrain != b.terrain) return terrain_rank(a.terrain) < terrain_rank(b.terrain);
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    return a.trial < b.trial;
  });
  return records;
}

}  // namespace softgait
