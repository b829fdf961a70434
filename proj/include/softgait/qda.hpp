#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "softgait/archive.hpp"

namespace softgait {

struct QdaOptions {
  int batch_size = 20;
  double mutation_sigma = 0.1;
  // Candidates drawn uniformly at random before mutation starts.
  int init_budget = 100;
  ArchiveBounds bounds{};
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const QdaOptions&) const = default;
};

/// Grid-archive quality diversity search: uniform random initialisation, then
/// Gaussian mutation of uniformly chosen elites.
class Qda {
 public:
  explicit Qda(QdaOptions options);

  std::vector<Genotype> ask();
  /// Offers every result of the last ask to the archive in candidate order.
  void tell(std::span<const Genotype> batch, std::span<const GaitResult> results);

  const Archive& archive() const { return archive_; }
  long evaluations() const { return evaluations_; }
  long asked() const { return asked_; }
  const QdaOptions& options() const { return options_; }

 private:
  Genotype random_genotype();

  QdaOptions options_;
  Archive archive_;
  std::mt19937_64 rng_;
  long asked_ = 0;
  long evaluations_ = 0;
  std::vector<Genotype> pending_;
};

}  // namespace softgait
