#include "adiabatic/errors.hpp"
#include "adiabatic/markov.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace adiabatic;

namespace {

Distribution dist(std::initializer_list<double> w) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
  Eigen::Index k = 0;
  for (double x : w) v[k++] = x;
  return Distribution(v);
}

Distribution random_distribution(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return Distribution(v / v.sum());
}

Eigen::MatrixXd shift_final(int n) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) p(i, i + 1) = 1.0;
  p(n, n) = 1.0;
  return p;
}

}  // namespace

TEST(Distribution, RejectsBadWeights) {
  EXPECT_THROW(dist({0.5, 0.6}), ValidationError);
  EXPECT_THROW(dist({1.5, -0.5}), ValidationError);
  EXPECT_NO_THROW(dist({0.25, 0.75}));
}

TEST(Matrices, ValidateRowsAndRates) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.4, 0.5, 0.5;
  EXPECT_THROW(StochasticMatrix{bad}, ValidationError);
  Eigen::MatrixXd q(2, 2);
  q << -1, 1, 2, -1;
  EXPECT_THROW(Generator{q}, ValidationError);
  q << 1, -1, 1, -1;
  EXPECT_THROW(Generator{q}, ValidationError);
  EXPECT_THROW(RateBound(-1.0), ValidationError);
}

TEST(TvDistance, Examples) {
  EXPECT_DOUBLE_EQ(tv_distance(dist({1, 0}), dist({0, 1})), 1.0);
  const auto mu = dist({0.3, 0.7});
  EXPECT_DOUBLE_EQ(tv_distance(mu, mu), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(dist({0.5, 0.5}), dist({0.75, 0.25})), 0.25);
  EXPECT_THROW(tv_distance(dist({1, 0}), dist({1, 0, 0})), DimensionMismatch);
}

TEST(TvDistance, MetricPropertiesOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto a = random_distribution(rng, n);
    const auto b = random_distribution(rng, n);
    const auto c = random_distribution(rng, n);
    const double ab = tv_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(ab, tv_distance(b, a));
    EXPECT_LE(tv_distance(a, c), ab + tv_distance(b, c) + 1e-15);
  }
}

TEST(Stationary, Examples) {
  const auto pi = stationary_distribution(StochasticMatrix(shift_final(6)));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(pi[i], 0.0, 1e-12);
  EXPECT_NEAR(pi[6], 1.0, 1e-12);

  EXPECT_THROW(stationary_distribution(StochasticMatrix::identity(4)), NonUniqueStationary);

  Eigen::MatrixXd p(2, 2);
  p << 0.7, 0.3, 0.3, 0.7;
  const auto sym = stationary_distribution(StochasticMatrix(p));
  EXPECT_NEAR(sym[0], 0.5, 1e-12);
  EXPECT_NEAR(sym[1], 0.5, 1e-12);

  EXPECT_THROW(stationary_distribution(Generator::zero(3)), NonUniqueStationary);
}

TEST(Stationary, FixedPointOnRandomKernels) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const StochasticMatrix p(oracle::random_kernel(rng, n, 0.0));
    const double tol = 1e-10;
    const auto pi = stationary_distribution(p, tol);
    EXPECT_LE(tv_distance(step_distribution(pi, p), pi), 10 * tol);

    const Generator q(oracle::random_generator(rng, n, 3.0, 0.0));
    const auto piq = stationary_distribution(q, tol);
    EXPECT_LE((piq.weights().transpose() * q.entries()).cwiseAbs().sum(), tol);
  }
}

TEST(Step, Examples) {
  const int n = 4;
  Eigen::MatrixXd initial = Eigen::MatrixXd::Zero(n + 1, n + 1);
  initial.col(0).setOnes();
  std::mt19937_64 rng(2);
  const auto rho = step_distribution(random_distribution(rng, n + 1), StochasticMatrix(initial));
  EXPECT_DOUBLE_EQ(rho[0], 1.0);

  const auto mu = dist({0.1, 0.2, 0.7});
  EXPECT_EQ(step_distribution(mu, StochasticMatrix::identity(3)).weights(), mu.weights());

  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 0.1, 0.9;
  const auto out = step_distribution(dist({0.2, 0.8}), StochasticMatrix(p));
  EXPECT_NEAR(out[0], 0.18, 1e-15);
  EXPECT_NEAR(out[1], 0.82, 1e-15);
  EXPECT_THROW(step_distribution(dist({1, 0}), StochasticMatrix(shift_final(2))), DimensionMismatch);
}

TEST(Transient, Examples) {
  const auto mu = dist({0.1, 0.6, 0.3});
  const auto same = transient_distribution(mu, Generator::zero(3), 7.0, RateBound(1.0));
  EXPECT_NEAR(tv_distance(same, mu), 0.0, 1e-15);

  Eigen::MatrixXd q(2, 2);
  q << -1, 1, 1, -1;
  const auto eq = transient_distribution(dist({1, 0}), Generator(q), 50.0, RateBound(1.0));
  EXPECT_NEAR(eq[0], 0.5, 1e-12);
  EXPECT_NEAR(eq[1], 0.5, 1e-12);

  EXPECT_THROW(transient_distribution(dist({1, 0}), Generator(q), 1.0, RateBound(0.5)),
               InvalidRateBound);
}

TEST(Transient, MatchesOdeIntegration) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd q = oracle::random_generator(rng, 20, 2.0);
    const auto mu = random_distribution(rng, 20);
    const auto got =
        transient_distribution(mu, Generator(q), 1.0, RateBound::for_generator(Generator(q)));
    const Eigen::VectorXd want = oracle::ode_evolve([&](double) { return q; }, mu.weights(), 0.0, 1.0);
    EXPECT_LE((got.weights() - want).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Transient, LargeHorizonIsSplit) {
  Eigen::MatrixXd q(2, 2);
  q << -3, 3, 1, -1;
  const auto out = transient_distribution(dist({1, 0}), Generator(q), 400.0, RateBound(4.0));
  EXPECT_NEAR(out[0], 0.25, 1e-12);
  EXPECT_NEAR(out.weights().sum(), 1.0, 1e-12);
}

TEST(Transient, SemigroupMassAndRateIndependence) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 12);
    const Generator q(oracle::random_generator(rng, n, 4.0 * u(rng) + 0.1));
    const auto lam = RateBound::for_generator(q);
    const auto mu = random_distribution(rng, n);
    const double t1 = 3.0 * u(rng);
    const double t2 = 3.0 * u(rng);
    const auto a = transient_distribution(transient_distribution(mu, q, t1, lam), q, t2, lam);
    const auto b = transient_distribution(mu, q, t1 + t2, lam);
    EXPECT_LE((a.weights() - b.weights()).cwiseAbs().sum(), 1e-8);
    EXPECT_GE(b.weights().minCoeff(), 0.0);
    EXPECT_NEAR(b.weights().sum(), 1.0, 1e-10);

    const auto c = transient_distribution(mu, q, t1 + t2, RateBound(lam.value() * 2.5 + 1.0));
    EXPECT_LE((c.weights() - b.weights()).cwiseAbs().sum(), 1e-10);

    const StochasticMatrix p(oracle::random_kernel(rng, n));
    const auto s = step_distribution(mu, p);
    EXPECT_GE(s.weights().minCoeff(), 0.0);
    EXPECT_NEAR(s.weights().sum(), 1.0, 1e-10);
  }
}
