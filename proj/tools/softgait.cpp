// softgait: command line front end for the gait optimisation experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "softgait/config.hpp"
#include "softgait/errors.hpp"
#include "softgait/experiment.hpp"
#include "softgait/parallel.hpp"

namespace fs = std::filesystem;
using namespace softgait;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_preset = true) {
  cmd->add_option("--config", opts.config_path, "Base config file (JSON)");
  if (with_preset) {
    cmd->add_option("--preset", opts.preset, "Named preset (desk or standard)")
        ->check(CLI::IsMember({"desk", "standard"}));
  }
  cmd->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig base_config(const CommonOptions& opts) {
  if (!opts.config_path.empty() && !opts.preset.empty()) {
    throw ConfigError("--config and --preset are mutually exclusive");
  }
  if (!opts.config_path.empty()) return load_config(opts.config_path);
  if (opts.preset == "desk") return ExperimentConfig::desk_preset();
  return ExperimentConfig{};
}

Genotype parse_genes(const std::string& csv) {
  std::vector<double> genes;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      genes.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--genes: '" + item + "' is not a number");
    }
  }
  return Genotype::from_span(genes);
}

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-robot gait optimisation and terrain transfer experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SOFTGAIT_VERSION);

  // config
  CommonOptions config_opts;
  std::string config_out;
  auto* config_cmd = app.add_subcommand("config", "Write the default (or preset) config");
  add_common(config_cmd, config_opts);
  config_cmd->add_option("--out", config_out, "Output file (default: stdout)");

  // pilot
  CommonOptions pilot_opts;
  int pilot_samples = 1000;
  std::uint64_t pilot_seed = 1;
  std::string pilot_terrain = "flat";
  double pilot_percentile = 99.0;
  std::string pilot_out = "config.json";
  auto* pilot_cmd = app.add_subcommand(
      "pilot", "Calibrate descriptor bounds from random genotypes and write a config");
  add_common(pilot_cmd, pilot_opts);
  pilot_cmd->add_option("--samples", pilot_samples)->check(CLI::PositiveNumber);
  pilot_cmd->add_option("--seed", pilot_seed);
  pilot_cmd->add_option("--terrain", pilot_terrain);
  pilot_cmd->add_option("--percentile", pilot_percentile)->check(CLI::Range(1.0, 100.0));
  pilot_cmd->add_option("--out", pilot_out);

  // optimize
  CommonOptions opt_opts;
  std::string opt_terrain;
  std::string opt_algorithm;
  int opt_trial = 0;
  std::optional<std::uint64_t> opt_seed;
  std::optional<int> opt_budget;
  std::string opt_out = "results";
  auto* opt_cmd = app.add_subcommand("optimize", "Run one optimisation trial");
  add_common(opt_cmd, opt_opts);
  opt_cmd->add_option("--terrain", opt_terrain)->required();
  opt_cmd->add_option("--algorithm", opt_algorithm)->required();
  opt_cmd->add_option("--trial", opt_trial)->check(CLI::NonNegativeNumber);
  opt_cmd->add_option("--seed", opt_seed, "Master seed");
  opt_cmd->add_option("--budget", opt_budget);
  opt_cmd->add_option("--out", opt_out, "Results directory");

  // transfer
  CommonOptions tr_opts;
  std::string tr_out = "results";
  std::string tr_terrains;
  auto* tr_cmd = app.add_subcommand("transfer", "Complete trial records with transfer scores");
  add_common(tr_cmd, tr_opts);
  tr_cmd->add_option("--out", tr_out, "Results directory");
  tr_cmd->add_option("--terrains", tr_terrains, "Comma-separated terrain set");

  // full
  CommonOptions full_opts;
  std::optional<int> full_trials;
  std::optional<int> full_budget;
  std::optional<std::uint64_t> full_seed;
  std::string full_terrains;
  std::string full_out = "results";
  auto* full_cmd = app.add_subcommand("full", "Optimisation and transfer over all terrains");
  add_common(full_cmd, full_opts);
  full_cmd->add_option("--trials", full_trials)->check(CLI::PositiveNumber);
  full_cmd->add_option("--budget", full_budget);
  full_cmd->add_option("--seed", full_seed, "Master seed");
  full_cmd->add_option("--terrains", full_terrains, "Comma-separated terrain set");
  full_cmd->add_option("--out", full_out, "Results directory");

  // aggregate
  CommonOptions agg_opts;
  std::string agg_out = "results";
  std::string agg_terrains;
  auto* agg_cmd = app.add_subcommand("aggregate", "Build transfer matrices from trial records");
  add_common(agg_cmd, agg_opts);
  agg_cmd->add_option("--out", agg_out, "Results directory");
  agg_cmd->add_option("--terrains", agg_terrains, "Comma-separated terrain set");

  // trace
  CommonOptions trace_opts;
  std::string trace_genes;
  std::string trace_terrain = "flat";
  std::string trace_out;
  auto* trace_cmd = app.add_subcommand("trace", "Dump the descriptor trace of one gait as CSV");
  add_common(trace_cmd, trace_opts);
  trace_cmd->add_option("--genes", trace_genes, "Five comma-separated genes in [0,1]")->required();
  trace_cmd->add_option("--terrain", trace_terrain);
  trace_cmd->add_option("--out", trace_out, "Output CSV (default: stdout)");

  // terrain-export
  CommonOptions te_opts;
  std::string te_terrain;
  std::string te_out;
  auto* te_cmd = app.add_subcommand("terrain-export", "Write a terrain profile as x,y CSV");
  add_common(te_cmd, te_opts);
  te_cmd->add_option("--terrain", te_terrain)->required();
  te_cmd->add_option("--out", te_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*config_cmd) {
      const ExperimentConfig cfg = base_config(config_opts);
      if (config_out.empty()) std::cout << to_json(cfg).dump(2) << '\n';
      else save_config(cfg, config_out);
    } else if (*pilot_cmd) {
      ExperimentConfig cfg = base_config(pilot_opts);
      const Terrain terrain = make_terrain(parse_terrain(pilot_terrain), cfg.terrain);
      std::mt19937_64 rng(pilot_seed);
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      std::vector<Genotype> genotypes;
      for (int i = 0; i < pilot_samples; ++i) {
        std::array<double, Genotype::kSize> g{};
        for (double& v : g) v = uniform(rng);
        genotypes.emplace_back(g);
      }
      std::vector<GaitResult> results(genotypes.size());
      parallel_for(genotypes.size(), pilot_opts.workers,
                   [&](std::size_t i) { results[i] = evaluate(genotypes[i], terrain, cfg.eval); });
      std::vector<double> squish;
      std::vector<double> wobble;
      for (const GaitResult& r : results) {
        if (r.failed) continue;
        squish.push_back(r.squish);
        wobble.push_back(r.wobble);
      }
      if (squish.empty()) throw Error("pilot: every evaluation failed");
      cfg.qda.bounds = {{0.0, percentile(squish, pilot_percentile)},
                        {0.0, percentile(wobble, pilot_percentile)}};
      cfg.validate();
      save_config(cfg, pilot_out);
      std::cerr << std::setprecision(17) << "pilot: " << squish.size() << " of " << results.size()
                << " evaluations ok; squish bounds [0, " << cfg.qda.bounds.squish.hi
                << "], wobble bounds [0, " << cfg.qda.bounds.wobble.hi << "] -> " << pilot_out
                << '\n';
    } else if (*opt_cmd) {
      ExperimentConfig cfg = base_config(opt_opts);
      if (opt_seed) cfg.master_seed = *opt_seed;
      if (opt_budget) cfg.budget = *opt_budget;
      cfg.validate();
      const TerrainKind terrain = parse_terrain(opt_terrain);
      const Algorithm algorithm = parse_algorithm(opt_algorithm);
      const auto seed = trial_seed(cfg.master_seed, terrain, algorithm, opt_trial);
      const TrialRecord rec =
          run_optimization_phase(terrain, algorithm, opt_trial, seed, cfg.budget, cfg, opt_opts.workers);
      save_record(opt_out, rec);
      std::cerr << "optimize: " << terrain_name(terrain) << '/' << algorithm_name(algorithm)
                << " trial " << opt_trial << " best fitness " << rec.training_best
                << (rec.failed ? " (FAILED: " + rec.error + ")" : "") << '\n';
      if (rec.failed) return 1;
    } else if (*tr_cmd) {
      ExperimentConfig cfg = base_config(tr_opts);
      if (!tr_terrains.empty()) cfg.terrains = parse_terrain_list(tr_terrains);
      cfg.validate();
      auto records = load_records(tr_out);
      if (records.empty()) throw Error("transfer: no trial records under " + tr_out);
      for (TrialRecord& rec : records) {
        std::vector<TerrainKind> others;
        for (TerrainKind t : cfg.terrains) {
          if (t != rec.terrain) others.push_back(t);
        }
        run_transfer_phase(rec, others, cfg, tr_opts.workers);
        save_record(tr_out, rec);
      }
      std::cerr << "transfer: completed " << records.size() << " records\n";
    } else if (*full_cmd) {
      ExperimentConfig cfg = base_config(full_opts);
      if (full_trials) cfg.trials = *full_trials;
      if (full_budget) cfg.budget = *full_budget;
      if (full_seed) cfg.master_seed = *full_seed;
      if (!full_terrains.empty()) cfg.terrains = parse_terrain_list(full_terrains);
      cfg.validate();
      const auto start = std::chrono::steady_clock::now();
      const AggregateResult result = run_full(cfg, full_out, full_opts.workers);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      int failed = 0;
      for (const TrainingSummary& s : result.training) failed += s.failed_trials;
      std::cerr << "full: " << cfg.terrains.size() << " terrains x " << cfg.trials
                << " trials x 2 algorithms in " << std::fixed << std::setprecision(1) << seconds
                << " s; failed trials: " << failed << "; outputs in " << full_out << '\n';
    } else if (*agg_cmd) {
      ExperimentConfig cfg = base_config(agg_opts);
      const auto records = load_records(agg_out);
      if (records.empty()) throw Error("aggregate: no trial records under " + agg_out);
      std::vector<TerrainKind> terrains;
      if (!agg_terrains.empty()) {
        terrains = parse_terrain_list(agg_terrains);
      } else {
        for (TerrainKind t : kAllTerrains) {
          const bool used = std::any_of(records.begin(), records.end(), [&](const TrialRecord& r) {
            return r.terrain == t || std::any_of(r.transfers.begin(), r.transfers.end(),
                                                 [&](const TransferEntry& e) { return e.terrain == t; });
          });
          if (used) terrains.push_back(t);
        }
      }
      write_aggregate(aggregate(records, terrains), fs::path(agg_out) / "aggregate");
      std::cerr << "aggregate: " << records.size() << " records -> "
                << (fs::path(agg_out) / "aggregate").string() << '\n';
    } else if (*trace_cmd) {
      ExperimentConfig cfg = base_config(trace_opts);
      const Terrain terrain = make_terrain(parse_terrain(trace_terrain), cfg.terrain);
      std::ofstream file;
      if (!trace_out.empty()) file = open_out(trace_out);
      std::ostream& out = trace_out.empty() ? std::cout : file;
      out << std::setprecision(17) << "time,com_x,com_y,diag_distance,pitch\n";
      const GaitResult r = evaluate(parse_genes(trace_genes), terrain, cfg.eval,
                                    [&](const TraceSample& s) {
                                      out << s.time << ',' << s.com_x << ',' << s.com_y << ','
                                          << s.diag_distance << ',' << s.pitch << '\n';
                                    });
      std::cerr << std::setprecision(6) << "trace: fitness " << r.fitness << " squish "
                << r.squish << " wobble " << r.wobble << (r.failed ? " (failed)" : "") << '\n';
    } else if (*te_cmd) {
      ExperimentConfig cfg = base_config(te_opts);
      const Terrain terrain = make_terrain(parse_terrain(te_terrain), cfg.terrain);
      if (te_out.empty()) {
        terrain.write_csv(std::cout);
      } else {
        auto out = open_out(te_out);
        terrain.write_csv(out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
