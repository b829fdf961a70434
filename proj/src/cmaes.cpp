#include "softgait/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "softgait/errors.hpp"

namespace softgait {

void CmaOptions::validate() const {
  if (population < 2) throw ConfigError("cma.population: must be >= 2");
  if (!(initial_mean >= 0.0 && initial_mean <= 1.0)) {
    throw ConfigError("cma.initial_mean: must lie in [0, 1]");
  }
  if (!(initial_sigma > 0.0 && std::isfinite(initial_sigma))) {
    throw ConfigError("cma.initial_sigma: must be positive");
  }
}

CmaConstants CmaConstants::standard(int dimension, int lambda) {
  const double n = dimension;
  CmaConstants k;
  k.lambda = lambda;
  k.mu = lambda / 2;
  k.weights.resize(static_cast<std::size_t>(k.mu));
  for (int i = 0; i < k.mu; ++i) {
    k.weights[static_cast<std::size_t>(i)] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  }
  const double sum = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
  double sum_sq = 0.0;
  for (double& w : k.weights) {
    w /= sum;
    sum_sq += w * w;
  }
  k.mu_eff = 1.0 / sum_sq;
  k.c_sigma = (k.mu_eff + 2.0) / (n + k.mu_eff + 5.0);
  k.d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((k.mu_eff - 1.0) / (n + 1.0)) - 1.0) + k.c_sigma;
  k.c_c = (4.0 + k.mu_eff / n) / (n + 4.0 + 2.0 * k.mu_eff / n);
  k.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + k.mu_eff);
  k.c_mu = std::min(1.0 - k.c_1,
                    2.0 * (k.mu_eff - 2.0 + 1.0 / k.mu_eff) / ((n + 2.0) * (n + 2.0) + k.mu_eff));
  k.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  return k;
}

CmaEs::CmaEs(CmaOptions options)
    : options_(options), rng_(options.seed), sigma_(options.initial_sigma) {
  options_.validate();
  k_ = CmaConstants::standard(kDim, options_.population);
  mean_.setConstant(options_.initial_mean);
  cov_.setIdentity();
  basis_.setIdentity();
  scales_.setOnes();
  p_sigma_.setZero();
  p_c_.setZero();
}

void CmaEs::decompose() {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov_);
  if (solver.info() != Eigen::Success) {
    throw DegenerateOptimizerError("cma: covariance eigen-decomposition failed at generation " +
                                   std::to_string(generation_));
  }
  Vector eig = solver.eigenvalues();
  const double top = eig.maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw DegenerateOptimizerError("cma: covariance lost positive definiteness");
  }
  // Clamp drifted eigenvalues so the matrix stays positive definite.
  const double floor = top * 1e-14;
  bool repaired = false;
  for (int i = 0; i < kDim; ++i) {
    if (eig(i) < floor) {
      eig(i) = floor;
      repaired = true;
    }
  }
  basis_ = solver.eigenvectors();
  scales_ = eig.cwiseSqrt();
  if (repaired) {
    cov_ = basis_ * eig.asDiagonal() * basis_.transpose();
    cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
  }
}

std::vector<Genotype> CmaEs::ask() {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DegenerateOptimizerError("cma: step size is not a positive finite number");
  }
  decompose();
  std::normal_distribution<double> normal(0.0, 1.0);
  pending_.clear();
  pending_.reserve(static_cast<std::size_t>(k_.lambda));
  for (int i = 0; i < k_.lambda; ++i) {
    Vector z;
    for (int d = 0; d < kDim; ++d) z(d) = normal(rng_);
    const Vector x = mean_ + sigma_ * (basis_ * scales_.cwiseProduct(z));
    std::array<double, Genotype::kSize> genes{};
    for (int d = 0; d < kDim; ++d) genes[static_cast<std::size_t>(d)] = std::clamp(x(d), 0.0, 1.0);
    pending_.emplace_back(genes);
  }
  return pending_;
}

void CmaEs::tell(std::span<const Genotype> batch, std::span<const double> fitness) {
  if (pending_.empty()) throw ProtocolError("cma: tell without a pending ask");
  if (batch.size() != pending_.size() || fitness.size() != pending_.size()) {
    throw ProtocolError("cma: batch size " + std::to_string(batch.size()) +
                        " does not match ask size " + std::to_string(pending_.size()));
  }
  if (!std::equal(batch.begin(), batch.end(), pending_.begin())) {
    throw ProtocolError("cma: batch does not match the asked candidates");
  }
  for (double f : fitness) {
    if (!std::isfinite(f)) throw ProtocolError("cma: fitness must be finite");
  }

  // Rank by descending fitness; candidate index breaks ties.
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

  if (fitness[order[0]] > best_fitness_) {
    best_fitness_ = fitness[order[0]];
    best_genotype_ = batch[order[0]];
  }

  auto as_vector = [](const Genotype& g) {
    Vector v;
    for (int d = 0; d < kDim; ++d) v(d) = g[static_cast<std::size_t>(d)];
    return v;
  };

  const Vector old_mean = mean_;
  std::vector<Vector> steps(static_cast<std::size_t>(k_.mu));
  Vector y_w = Vector::Zero();
  for (int i = 0; i < k_.mu; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    steps[ui] = (as_vector(batch[order[ui]]) - old_mean) / sigma_;
    y_w += k_.weights[ui] * steps[ui];
  }
  mean_ = old_mean + sigma_ * y_w;

  // C^{-1/2} y_w
  const Vector c_inv_sqrt_y = basis_ * (basis_.transpose() * y_w).cwiseQuotient(scales_);
  p_sigma_ = (1.0 - k_.c_sigma) * p_sigma_ +
             std::sqrt(k_.c_sigma * (2.0 - k_.c_sigma) * k_.mu_eff) * c_inv_sqrt_y;

  const double n = kDim;
  const double ps_norm = p_sigma_.norm();
  const double correction =
      std::sqrt(1.0 - std::pow(1.0 - k_.c_sigma, 2.0 * static_cast<double>(generation_ + 1)));
  const bool h_sigma = ps_norm / correction < (1.4 + 2.0 / (n + 1.0)) * k_.chi_n;

  p_c_ = (1.0 - k_.c_c) * p_c_;
  if (h_sigma) p_c_ += std::sqrt(k_.c_c * (2.0 - k_.c_c) * k_.mu_eff) * y_w;

  const double delta_h = h_sigma ? 0.0 : k_.c_c * (2.0 - k_.c_c);
  Matrix rank_mu = Matrix::Zero();
  for (int i = 0; i < k_.mu; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    rank_mu += k_.weights[ui] * steps[ui] * steps[ui].transpose();
  }
  cov_ = (1.0 + k_.c_1 * delta_h - k_.c_1 - k_.c_mu) * cov_ +
         k_.c_1 * p_c_ * p_c_.transpose() + k_.c_mu * rank_mu;
  cov_ = (0.5 * (cov_ + cov_.transpose())).eval();

  sigma_ *= std::exp((k_.c_sigma / k_.d_sigma) * (ps_norm / k_.chi_n - 1.0));

  ++generation_;
  evaluations_ += static_cast<long>(batch.size());
  pending_.clear();
  if (!cov_.allFinite() || !std::isfinite(sigma_)) {
    throw DegenerateOptimizerError("cma: non-finite state after generation " +
                                   std::to_string(generation_));
  }
}

}  // namespace softgait
