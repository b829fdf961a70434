#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "softgait/morphology.hpp"

namespace softgait {

struct CmaOptions {
  int population = 20;
  double initial_mean = 0.5;
  double initial_sigma = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const CmaOptions&) const = default;
};

/// Strategy constants of the standard (mu/mu_w, lambda)-CMA-ES with positive
/// recombination weights.
struct CmaConstants {
  int lambda = 0;
  int mu = 0;
  std::vector<double> weights;
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;  // E||N(0, I)||

  static CmaConstants standard(int dimension, int lambda);
};

/// Maximising CMA-ES over the genotype box [0, 1]^5. Candidates are clipped
/// into the box after sampling and the clipped points drive the update.
class CmaEs {
 public:
  static constexpr int kDim = static_cast<int>(Genotype::kSize);
  using Vector = Eigen::Matrix<double, kDim, 1>;
  using Matrix = Eigen::Matrix<double, kDim, kDim>;

  explicit CmaEs(CmaOptions options);

  /// Samples one generation. Throws DegenerateOptimizerError if the
  /// covariance cannot be decomposed.
  std::vector<Genotype> ask();
  /// Consumes the scores of the last ask, in candidate order. Throws
  /// ProtocolError if no ask is pending or the batch does not match it.
  void tell(std::span<const Genotype> batch, std::span<const double> fitness);

  const Vector& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Matrix& covariance() const { return cov_; }
  const Vector& path_sigma() const { return p_sigma_; }
  const Vector& path_c() const { return p_c_; }
  long generation() const { return generation_; }
  long evaluations() const { return evaluations_; }
  const CmaConstants& constants() const { return k_; }

  /// Best candidate seen across all tells.
  const std::optional<Genotype>& best_genotype() const { return best_genotype_; }
  double best_fitness() const { return best_fitness_; }

 private:
  void decompose();

  CmaOptions options_;
  CmaConstants k_;
  std::mt19937_64 rng_;
  Vector mean_;
  double sigma_;
  Matrix cov_;
  Matrix basis_;    // eigenvectors of cov_
  Vector scales_;   // sqrt of eigenvalues
  Vector p_sigma_;
  Vector p_c_;
  long generation_ = 0;
  long evaluations_ = 0;
  std::vector<Genotype> pending_;
  std::optional<Genotype> best_genotype_;
  double best_fitness_ = -std::numeric_limits<double>::infinity();
};

}  // namespace softgait
