#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "softgait/config.hpp"
#include "softgait/errors.hpp"
#include "softgait/experiment.hpp"

using namespace softgait;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.terrains = {TerrainKind::kFlat, TerrainKind::kSpiky, TerrainKind::kValley};
  c.trials = 2;
  c.budget = 40;
  c.qda.init_budget = 20;
  c.eval.duration = 1.0;
  c.eval.settle_time = 0.2;
  return c;
}

TrialRecord fake(TerrainKind train, Algorithm alg, int trial, double best,
                 std::vector<std::pair<TerrainKind, double>> transfers) {
  TrialRecord r;
  r.terrain = train;
  r.algorithm = alg;
  r.trial = trial;
  r.training_best = best;
  for (auto [t, f] : transfers) r.transfers.push_back({t, f, 1, 0});
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("softgait_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("trial seeds are deterministic and distinct") {
  std::set<std::uint64_t> seen;
  for (TerrainKind t : kAllTerrains) {
    for (Algorithm a : {Algorithm::kCma, Algorithm::kQda}) {
      for (int i = 0; i < 30; ++i) {
        const auto s = trial_seed(1, t, a, i);
        CHECK(s == trial_seed(1, t, a, i));
        seen.insert(s);
      }
    }
  }
  CHECK(seen.size() == 6 * 2 * 30);
  CHECK(trial_seed(1, TerrainKind::kFlat, Algorithm::kCma, 0) !=
        trial_seed(2, TerrainKind::kFlat, Algorithm::kCma, 0));
}

TEST_CASE("algorithm names parse") {
  CHECK(parse_algorithm("cma") == Algorithm::kCma);
  CHECK(parse_algorithm(algorithm_name(Algorithm::kQda)) == Algorithm::kQda);
  CHECK_THROWS_AS(parse_algorithm("ga"), ConfigError);
}

TEST_CASE("optimisation spends exactly the budget and is reproducible") {
  const ExperimentConfig cfg = tiny();
  for (Algorithm alg : {Algorithm::kCma, Algorithm::kQda}) {
    CAPTURE(algorithm_name(alg));
    const auto seed = trial_seed(cfg.master_seed, TerrainKind::kFlat, alg, 0);
    const TrialRecord a = run_optimization_phase(TerrainKind::kFlat, alg, 0, seed, 40, cfg, 1);
    const TrialRecord b = run_optimization_phase(TerrainKind::kFlat, alg, 0, seed, 40, cfg, 3);
    CHECK(a == b);
    CHECK_FALSE(a.failed);
    CHECK(a.training_evaluations == 40);
    REQUIRE(a.champion.has_value());
    CHECK(a.training_best == a.champion->result.fitness);
    CHECK(a.archive.has_value() == (alg == Algorithm::kQda));
    if (a.archive) CHECK(a.archive->best()->result.fitness == a.training_best);
  }
  CHECK_THROWS_AS(run_optimization_phase(TerrainKind::kFlat, Algorithm::kCma, 0, 1, 30, cfg),
                  ConfigError);
}

TEST_CASE("transfer re-evaluates on every target without retraining") {
  const ExperimentConfig cfg = tiny();
  for (Algorithm alg : {Algorithm::kCma, Algorithm::kQda}) {
    CAPTURE(algorithm_name(alg));
    TrialRecord r = run_optimization_phase(TerrainKind::kSpiky, alg, 0, 5, 40, cfg);
    const TrialRecord before = r;
    const std::vector<TerrainKind> targets = cfg.terrains;
    run_transfer_phase(r, targets, cfg);
    REQUIRE(r.transfers.size() == 3);
    CHECK(r.champion == before.champion);
    CHECK(r.archive == before.archive);
    for (const auto& t : r.transfers) {
      const int expected = alg == Algorithm::kCma ? 1 : static_cast<int>(r.archive->occupancy());
      CHECK(t.evaluations == expected);
      if (t.terrain == TerrainKind::kSpiky) CHECK(t.best_fitness == r.training_best);
    }
  }
}

TEST_CASE("records round-trip through their files") {
  const ExperimentConfig cfg = tiny();
  TrialRecord r = run_optimization_phase(TerrainKind::kValley, Algorithm::kQda, 1, 9, 40, cfg);
  run_transfer_phase(r, cfg.terrains, cfg);
  std::stringstream ss;
  write_record(ss, r);
  CHECK(read_record(ss) == r);

  const fs::path root = scratch_dir("records");
  save_record(root, r);
  CHECK(fs::exists(record_path(root, TerrainKind::kValley, Algorithm::kQda, 1)));
  const auto all = load_records(root);
  REQUIRE(all.size() == 1);
  CHECK(all[0] == r);

  std::stringstream bad("{\"format\":\"softgait-trial\",\"version\":99}\n");
  CHECK_THROWS(read_record(bad));
}

TEST_CASE("aggregate matrix examples") {
  const std::vector<TerrainKind> terrains{TerrainKind::kFlat, TerrainKind::kSpiky};
  SUBCASE("single trial") {
    const std::vector<TrialRecord> recs{
        fake(TerrainKind::kFlat, Algorithm::kCma, 0, 2.0,
             {{TerrainKind::kFlat, 2.0}, {TerrainKind::kSpiky, 0.5}})};
    const auto agg = aggregate(recs, terrains);
    CHECK(*agg.cma.at(TerrainKind::kFlat, TerrainKind::kSpiky) == doctest::Approx(-1.5));
    CHECK_FALSE(agg.cma.at(TerrainKind::kFlat, TerrainKind::kFlat).has_value());
    CHECK_FALSE(agg.cma.at(TerrainKind::kSpiky, TerrainKind::kFlat).has_value());
  }
  SUBCASE("identical fitness everywhere gives zero") {
    const std::vector<TrialRecord> recs{
        fake(TerrainKind::kFlat, Algorithm::kQda, 0, 1.0, {{TerrainKind::kSpiky, 1.0}}),
        fake(TerrainKind::kSpiky, Algorithm::kQda, 0, 1.0, {{TerrainKind::kFlat, 1.0}})};
    const auto agg = aggregate(recs, terrains);
    CHECK(*agg.qda.at(TerrainKind::kFlat, TerrainKind::kSpiky) == 0.0);
    CHECK(*agg.qda.at(TerrainKind::kSpiky, TerrainKind::kFlat) == 0.0);
  }
  SUBCASE("mean over trials, failed trials excluded") {
    std::vector<TrialRecord> recs{
        fake(TerrainKind::kFlat, Algorithm::kCma, 0, 2.0, {{TerrainKind::kSpiky, 1.0}}),
        fake(TerrainKind::kFlat, Algorithm::kCma, 1, 2.0, {{TerrainKind::kSpiky, 3.0}}),
        fake(TerrainKind::kFlat, Algorithm::kCma, 2, 9.0, {{TerrainKind::kSpiky, 0.0}})};
    recs[2].failed = true;
    const auto agg = aggregate(recs, terrains);
    CHECK(*agg.cma.at(TerrainKind::kFlat, TerrainKind::kSpiky) == doctest::Approx(0.0));
    const TrainingSummary* s = agg.summary(Algorithm::kCma, TerrainKind::kFlat);
    REQUIRE(s != nullptr);
    CHECK(s->successful_trials == 2);
    CHECK(s->failed_trials == 1);
    CHECK(*s->mean_training_best == doctest::Approx(2.0));
  }
}

TEST_CASE("aggregate CSVs mark the diagonal and missing cells") {
  const std::vector<TerrainKind> terrains{TerrainKind::kFlat, TerrainKind::kSpiky};
  const std::vector<TrialRecord> recs{
      fake(TerrainKind::kFlat, Algorithm::kCma, 0, 2.0, {{TerrainKind::kSpiky, 0.5}})};
  const fs::path dir = scratch_dir("aggregate");
  write_aggregate(aggregate(recs, terrains), dir);
  const std::string m = slurp(dir / "matrix_cma.csv");
  CHECK(m.find("NA") != std::string::npos);
  CHECK(m.find("missing") != std::string::npos);
  CHECK(m.find("-1.5") != std::string::npos);
  for (auto f : {"matrix_qda.csv", "training_summary.csv", "distributions.csv"}) {
    CHECK(fs::exists(dir / f));
  }
}

TEST_CASE("config JSON round-trips and rejects bad fields by name") {
  const ExperimentConfig cfg = ExperimentConfig::desk_preset();
  CHECK(config_from_json(to_json(cfg)) == cfg);
  CHECK(config_from_json(to_json(ExperimentConfig{})) == ExperimentConfig{});

  nlohmann::json j = to_json(cfg);
  j["sim"]["gravty"] = 9.0;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("sim.gravty"), ConfigError);
  j = to_json(cfg);
  j["evaluation"]["duration"] = "long";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("evaluation.duration"),
                       ConfigError);
  j = to_json(cfg);
  j["budget"] = 610;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("budget"), ConfigError);
  j = to_json(cfg);
  j["terrains"] = {"flat", "lava"};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  const fs::path dir = scratch_dir("config");
  save_config(cfg, dir / "c.json");
  CHECK(load_config(dir / "c.json") == cfg);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
}

TEST_CASE("terrain lists parse from comma-separated text") {
  const auto t = parse_terrain_list("flat,spiky,valley");
  CHECK(t == std::vector<TerrainKind>{TerrainKind::kFlat, TerrainKind::kSpiky,
                                      TerrainKind::kValley});
  CHECK_THROWS_AS(parse_terrain_list("flat,,spiky"), ConfigError);
}

TEST_CASE("full run writes identical artifacts for any worker count") {
  ExperimentConfig cfg = tiny();
  cfg.terrains = {TerrainKind::kFlat, TerrainKind::kSawtooth};
  cfg.trials = 1;
  const fs::path a = scratch_dir("full_a");
  const fs::path b = scratch_dir("full_b");
  run_full(cfg, a, 1);
  run_full(cfg, b, 4);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), a);
    CAPTURE(rel.string());
    CHECK(slurp(e.path()) == slurp(b / rel));
  }
  CHECK(files >= 4 + 4);
  CHECK(make_manifest(cfg) == make_manifest(cfg));
}
