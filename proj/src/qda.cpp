#include "softgait/qda.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "softgait/errors.hpp"

namespace softgait {

void QdaOptions::validate() const {
  if (batch_size < 1) throw ConfigError("qda.batch_size: must be >= 1");
  if (!(mutation_sigma > 0.0 && std::isfinite(mutation_sigma))) {
    throw ConfigError("qda.mutation_sigma: must be positive");
  }
  if (init_budget < 0) throw ConfigError("qda.init_budget: must be >= 0");
  bounds.validate();
}

Qda::Qda(QdaOptions options)
    : options_(options), archive_(options.bounds), rng_(options.seed) {
  options_.validate();
}

Genotype Qda::random_genotype() {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::array<double, Genotype::kSize> genes{};
  for (double& g : genes) g = uniform(rng_);
  return Genotype(genes);
}

std::vector<Genotype> Qda::ask() {
  pending_.clear();
  pending_.reserve(static_cast<std::size_t>(options_.batch_size));
  const auto elites = archive_.elites();
  std::normal_distribution<double> noise(0.0, options_.mutation_sigma);
  for (int i = 0; i < options_.batch_size; ++i) {
    if (asked_ + i < options_.init_budget || elites.empty()) {
      pending_.push_back(random_genotype());
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, elites.size() - 1);
    const Genotype& parent = elites[pick(rng_)].second.genotype;
    std::array<double, Genotype::kSize> genes{};
    for (std::size_t d = 0; d < Genotype::kSize; ++d) {
      genes[d] = std::clamp(parent[d] + noise(rng_), 0.0, 1.0);
    }
    pending_.emplace_back(genes);
  }
  asked_ += options_.batch_size;
  return pending_;
}

void Qda::tell(std::span<const Genotype> batch, std::span<const GaitResult> results) {
  if (pending_.empty()) throw ProtocolError("qda: tell without a pending ask");
  if (batch.size() != pending_.size() || results.size() != pending_.size()) {
    throw ProtocolError("qda: batch size " + std::to_string(batch.size()) +
                        " does not match ask size " + std::to_string(pending_.size()));
  }
  if (!std::equal(batch.begin(), batch.end(), pending_.begin())) {
    throw ProtocolError("qda: batch does not match the asked candidates");
  }
  for (std::size_t i = 0; i < batch.size(); ++i) archive_.offer(batch[i], results[i]);
  evaluations_ += static_cast<long>(batch.size());
  pending_.clear();
#ifndef NDEBUG
  if (!archive_.is_consistent()) throw ProtocolError("qda: archive failed re-binning check");
#endif
}

}  // namespace softgait
