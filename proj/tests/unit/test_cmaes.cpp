#include <cmath>
#include <numeric>

#include "doctest.h"
#include "softgait/cmaes.hpp"
#include "softgait/errors.hpp"

using namespace softgait;

namespace {

double neg_sphere(const Genotype& g) {
  double s = 0.0;
  for (double x : g.genes()) s += (x - 0.3) * (x - 0.3);
  return -s;
}

std::vector<double> score(const std::vector<Genotype>& batch, double shift = 0.0) {
  std::vector<double> f;
  for (const auto& g : batch) f.push_back(neg_sphere(g) + shift);
  return f;
}

}  // namespace

TEST_CASE("standard constants") {
  const CmaConstants k = CmaConstants::standard(5, 20);
  CHECK(k.lambda == 20);
  CHECK(k.mu == 10);
  CHECK(std::accumulate(k.weights.begin(), k.weights.end(), 0.0) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < k.weights.size(); ++i) CHECK(k.weights[i] < k.weights[i - 1]);
  CHECK(k.weights.back() > 0.0);
  double sq = 0.0;
  for (double w : k.weights) sq += w * w;
  CHECK(k.mu_eff == doctest::Approx(1.0 / sq));
  CHECK(k.chi_n == doctest::Approx(std::sqrt(5.0) * (1 - 1.0 / 20 + 1.0 / (21 * 25))));
  CHECK(k.c_1 > 0.0);
  CHECK(k.c_1 + k.c_mu <= 1.0);
}

TEST_CASE("ask returns a full clipped batch, reproducibly") {
  CmaEs a(CmaOptions{20, 0.5, 0.3, 42});
  CmaEs b(CmaOptions{20, 0.5, 0.3, 42});
  const auto x = a.ask();
  CHECK(x.size() == 20);
  CHECK(x == b.ask());
  for (const auto& g : x) {
    for (double v : g.genes()) CHECK((v >= 0.0 && v <= 1.0));
  }
  CmaEs c(CmaOptions{20, 0.5, 0.3, 43});
  CHECK(x != c.ask());
}

TEST_CASE("tell enforces the ask/tell protocol") {
  CmaEs es(CmaOptions{});
  const std::vector<Genotype> none;
  CHECK_THROWS_AS(es.tell(none, {}), ProtocolError);
  auto batch = es.ask();
  std::vector<double> f(19, 0.0);
  CHECK_THROWS_AS(es.tell(batch, f), ProtocolError);
  f.resize(20, 0.0);
  auto other = batch;
  other[3] = Genotype({0, 0, 0, 0, 0});
  CHECK_THROWS_AS(es.tell(other, f), ProtocolError);
  es.tell(batch, f);
  CHECK(es.generation() == 1);
  CHECK(es.evaluations() == 20);
  CHECK_THROWS_AS(es.tell(batch, f), ProtocolError);
}

TEST_CASE("mean moves toward the better candidates") {
  CmaEs es(CmaOptions{20, 0.5, 0.3, 7});
  const auto batch = es.ask();
  const CmaEs::Vector before = es.mean();
  Eigen::Map<const CmaEs::Vector> target(batch[0].genes().data());
  std::vector<double> f;
  for (const auto& g : batch) {
    Eigen::Map<const CmaEs::Vector> x(g.genes().data());
    f.push_back(-(x - target).squaredNorm());
  }
  es.tell(batch, f);
  CHECK((es.mean() - target).norm() < (before - target).norm());
  CHECK(es.best_genotype() == batch[0]);
  CHECK(es.best_fitness() == 0.0);
}

TEST_CASE("a constant fitness shift changes nothing") {
  CmaEs a(CmaOptions{20, 0.5, 0.3, 3});
  CmaEs b(CmaOptions{20, 0.5, 0.3, 3});
  for (int gen = 0; gen < 15; ++gen) {
    const auto xa = a.ask();
    const auto xb = b.ask();
    REQUIRE(xa == xb);
    a.tell(xa, score(xa));
    b.tell(xb, score(xb, 100.0));
  }
  CHECK(a.mean() == b.mean());
  CHECK(a.sigma() == b.sigma());
}

TEST_CASE("covariance stays symmetric positive definite") {
  CmaEs es(CmaOptions{20, 0.5, 0.3, 8});
  for (int gen = 0; gen < 100; ++gen) {
    const auto x = es.ask();
    es.tell(x, score(x));
    const CmaEs::Matrix& c = es.covariance();
    REQUIRE((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<CmaEs::Matrix> solver(c);
    REQUIRE(solver.eigenvalues().minCoeff() > 0.0);
    REQUIRE(std::isfinite(es.sigma()));
  }
}

TEST_CASE("sphere optimum is found from every seed") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    CmaEs es(CmaOptions{20, 0.5, 0.3, seed});
    while (es.evaluations() < 5000 && es.best_fitness() <= -1e-10) {
      const auto x = es.ask();
      es.tell(x, score(x));
    }
    CHECK(es.best_fitness() > -1e-10);
  }
}

TEST_CASE("option validation") {
  CHECK_THROWS_AS(CmaEs(CmaOptions{1, 0.5, 0.3, 0}), ConfigError);
  CHECK_THROWS_AS(CmaEs(CmaOptions{20, 0.5, 0.0, 0}), ConfigError);
  CHECK_THROWS_AS(CmaEs(CmaOptions{20, 1.5, 0.3, 0}), ConfigError);
}
