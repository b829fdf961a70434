#include "softgait/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>

#include "softgait/errors.hpp"
#include "softgait/parallel.hpp"

namespace softgait {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<GaitResult> evaluate_batch(std::span<const Genotype> batch, const Terrain& terrain,
                                       const EvalConfig& cfg, int workers) {
  std::vector<GaitResult> results(batch.size());
  parallel_for(batch.size(), workers,
               [&](std::size_t i) { results[i] = evaluate(batch[i], terrain, cfg); });
  return results;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, TerrainKind terrain, Algorithm algorithm,
                         int trial) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a(terrain_name(terrain)));
  h = splitmix64(h ^ fnv1a(algorithm_name(algorithm)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
  return h;
}

TrialRecord run_optimization_phase(TerrainKind terrain_kind, Algorithm algorithm, int trial,
                                   std::uint64_t seed, int budget,
                                   const ExperimentConfig& config, int workers) {
  if (budget < config.batch_size || budget % config.batch_size != 0) {
    throw ConfigError("budget: must be a positive multiple of batch_size");
  }
  const Terrain terrain = make_terrain(terrain_kind, config.terrain);

  TrialRecord rec;
  rec.terrain = terrain_kind;
  rec.algorithm = algorithm;
  rec.trial = trial;
  rec.seed = seed;
  rec.budget = budget;
  rec.batch_size = config.batch_size;
  const int cycles = budget / config.batch_size;

  auto account = [&](std::span<const GaitResult> results) {
    rec.training_evaluations += static_cast<int>(results.size());
    for (const GaitResult& r : results) rec.training_failed_evaluations += r.failed ? 1 : 0;
  };

  try {
    if (algorithm == Algorithm::kCma) {
      CmaOptions options = config.cma;
      options.seed = seed;
      CmaEs cma(options);
      double best = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < cycles; ++c) {
        const auto batch = cma.ask();
        const auto results = evaluate_batch(batch, terrain, config.eval, workers);
        account(results);
        std::vector<double> fitness(results.size());
        for (std::size_t i = 0; i < results.size(); ++i) {
          fitness[i] = results[i].fitness;
          if (fitness[i] > best) {
            best = fitness[i];
            rec.champion = Elite{batch[i], results[i]};
          }
        }
        cma.tell(batch, fitness);
      }
      rec.training_best = best;
    } else {
      QdaOptions options = config.qda;
      options.seed = seed;
      Qda qda(options);
      for (int c = 0; c < cycles; ++c) {
        const auto batch = qda.ask();
        const auto results = evaluate_batch(batch, terrain, config.eval, workers);
        account(results);
        qda.tell(batch, results);
      }
      rec.archive = qda.archive();
      if (const Elite* best = qda.archive().best()) {
        rec.champion = *best;
        rec.training_best = best->result.fitness;
      }
    }
  } catch (const DegenerateOptimizerError& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.champion.reset();
    rec.archive.reset();
    rec.training_best = 0.0;
  }
  return rec;
}

void run_transfer_phase(TrialRecord& record, std::span<const TerrainKind> targets,
                        const ExperimentConfig& config, int workers) {
  record.transfers.clear();
  if (record.failed) return;

  std::vector<Genotype> candidates;
  if (record.algorithm == Algorithm::kCma) {
    if (record.champion) candidates.push_back(record.champion->genotype);
  } else if (record.archive) {
    for (const auto& [cell, elite] : record.archive->elites()) candidates.push_back(elite.genotype);
  }

  std::vector<Terrain> terrains;
  for (TerrainKind t : targets) terrains.push_back(make_terrain(t, config.terrain));

  const std::size_t per_target = candidates.size();
  std::vector<GaitResult> results(per_target * targets.size());
  parallel_for(results.size(), workers, [&](std::size_t job) {
    results[job] = evaluate(candidates[job % per_target], terrains[job / per_target], config.eval);
  });

  for (std::size_t t = 0; t < targets.size(); ++t) {
    TransferEntry entry;
    entry.terrain = targets[t];
    entry.evaluations = static_cast<int>(per_target);
    for (std::size_t k = 0; k < per_target; ++k) {
      const GaitResult& r = results[t * per_target + k];
      entry.failed_evaluations += r.failed ? 1 : 0;
      entry.best_fitness = std::max(entry.best_fitness, r.fitness);
    }
    record.transfers.push_back(entry);
  }
}

const std::optional<double>& TransferMatrix::at(TerrainKind train, TerrainKind target) const {
  auto index = [&](TerrainKind t) {
    auto it = std::find(terrains.begin(), terrains.end(), t);
    if (it == terrains.end()) throw ValidationError("transfer matrix: terrain not in matrix");
    return static_cast<std::size_t>(it - terrains.begin());
  };
  return mean_delta[index(train)][index(target)];
}

const TrainingSummary* AggregateResult::summary(Algorithm a, TerrainKind t) const {
  for (const TrainingSummary& s : training) {
    if (s.algorithm == a && s.terrain == t) return &s;
  }
  return nullptr;
}

AggregateResult aggregate(std::span<const TrialRecord> records,
                          std::span<const TerrainKind> terrains) {
  const std::size_t n = terrains.size();
  auto index_of = [&](TerrainKind t) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i) {
      if (terrains[i] == t) return i;
    }
    return std::nullopt;
  };

  AggregateResult out;
  for (Algorithm a : {Algorithm::kCma, Algorithm::kQda}) {
    TransferMatrix m;
    m.terrains.assign(terrains.begin(), terrains.end());
    std::vector<std::vector<double>> sums(n, std::vector<double>(n, 0.0));
    m.counts.assign(n, std::vector<int>(n, 0));
    m.mean_delta.assign(n, std::vector<std::optional<double>>(n));

    for (TerrainKind train : terrains) {
      TrainingSummary s;
      s.algorithm = a;
      s.terrain = train;
      double total = 0.0;
      for (const TrialRecord& r : records) {
        if (r.algorithm != a || r.terrain != train) continue;
        if (r.failed) {
          ++s.failed_trials;
          continue;
        }
        ++s.successful_trials;
        total += r.training_best;
        out.distribution.push_back({a, train, train, r.trial, r.training_best, 0.0});
        const std::size_t row = *index_of(train);
        for (const TransferEntry& t : r.transfers) {
          const auto col = index_of(t.terrain);
          if (!col || *col == row) continue;
          const double delta = t.best_fitness - r.training_best;
          sums[row][*col] += delta;
          ++m.counts[row][*col];
          out.distribution.push_back({a, train, t.terrain, r.trial, t.best_fitness, delta});
        }
      }
      if (s.successful_trials > 0) s.mean_training_best = total / s.successful_trials;
      out.training.push_back(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && m.counts[i][j] > 0) m.mean_delta[i][j] = sums[i][j] / m.counts[i][j];
      }
    }
    (a == Algorithm::kCma ? out.cma : out.qda) = std::move(m);
  }
  return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_aggregate(const AggregateResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (Algorithm a : {Algorithm::kCma, Algorithm::kQda}) {
    const TransferMatrix& m = result.matrix(a);
    auto out = open_csv(dir / ("matrix_" + std::string(algorithm_name(a)) + ".csv"));
    out << "train";
    for (TerrainKind t : m.terrains) out << ',' << terrain_name(t);
    out << '\n';
    for (std::size_t i = 0; i < m.terrains.size(); ++i) {
      out << terrain_name(m.terrains[i]);
      for (std::size_t j = 0; j < m.terrains.size(); ++j) {
        out << ',';
        if (i == j) out << "NA";
        else if (m.mean_delta[i][j]) out << *m.mean_delta[i][j];
        else out << "missing";
      }
      out << '\n';
    }
  }
  {
    auto out = open_csv(dir / "training_summary.csv");
    out << "algorithm,terrain,successful_trials,failed_trials,mean_training_best\n";
    for (const TrainingSummary& s : result.training) {
      out << algorithm_name(s.algorithm) << ',' << terrain_name(s.terrain) << ','
          << s.successful_trials << ',' << s.failed_trials << ',';
      if (s.mean_training_best) out << *s.mean_training_best;
      else out << "missing";
      out << '\n';
    }
  }
  {
    auto out = open_csv(dir / "distributions.csv");
    out << "algorithm,train_terrain,eval_terrain,trial,fitness,delta\n";
    for (const DistributionRow& r : result.distribution) {
      out << algorithm_name(r.algorithm) << ',' << terrain_name(r.train) << ','
          << terrain_name(r.target) << ',' << r.trial << ',' << r.fitness << ',' << r.delta
          << '\n';
    }
  }
}

nlohmann::json make_manifest(const ExperimentConfig& config) {
  const CmaConstants k = CmaConstants::standard(CmaEs::kDim, config.batch_size);
  nlohmann::json trials = nlohmann::json::array();
  for (TerrainKind t : config.terrains) {
    for (Algorithm a : {Algorithm::kCma, Algorithm::kQda}) {
      for (int i = 0; i < config.trials; ++i) {
        trials.push_back({{"terrain", terrain_name(t)},
                          {"algorithm", algorithm_name(a)},
                          {"trial", i},
                          {"seed", trial_seed(config.master_seed, t, a, i)}});
      }
    }
  }
  return {{"format", "softgait-manifest"},
          {"version", 1},
          {"software_version", SOFTGAIT_VERSION},
          {"master_seed", config.master_seed},
          {"config", to_json(config)},
          {"cma_constants",
           {{"lambda", k.lambda},
            {"mu", k.mu},
            {"weights", k.weights},
            {"mu_eff", k.mu_eff},
            {"c_sigma", k.c_sigma},
            {"d_sigma", k.d_sigma},
            {"c_c", k.c_c},
            {"c_1", k.c_1},
            {"c_mu", k.c_mu}}},
          {"trials", trials}};
}

AggregateResult run_full(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         int workers) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream manifest(out_dir / "manifest.json", std::ios::binary);
    if (!manifest) throw Error("cannot write manifest in " + out_dir.string());
    manifest << make_manifest(config).dump(2) << '\n';
  }

  struct Job {
    TerrainKind terrain;
    Algorithm algorithm;
    int trial;
  };
  std::vector<Job> jobs;
  for (TerrainKind t : config.terrains) {
    for (Algorithm a : {Algorithm::kCma, Algorithm::kQda}) {
      for (int i = 0; i < config.trials; ++i) jobs.push_back({t, a, i});
    }
  }

  std::vector<TrialRecord> records(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto seed = trial_seed(config.master_seed, job.terrain, job.algorithm, job.trial);
    TrialRecord rec =
        run_optimization_phase(job.terrain, job.algorithm, job.trial, seed, config.budget, config);
    std::vector<TerrainKind> others;
    for (TerrainKind t : config.terrains) {
      if (t != job.terrain) others.push_back(t);
    }
    run_transfer_phase(rec, others, config);
    save_record(out_dir, rec);
    records[j] = std::move(rec);
  });

  AggregateResult result = aggregate(records, config.terrains);
  write_aggregate(result, out_dir / "aggregate");
  return result;
}

}  // namespace softgait
