#include "adiabatic/errors.hpp"
#include "adiabatic/glauber.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace adiabatic;

namespace {

// Independent torus bookkeeping: site index = sum_k c_k n^k.
std::vector<std::size_t> oracle_neighbours(int n, int d, std::size_t site) {
  std::vector<std::size_t> out;
  std::size_t stride = 1;
  for (int k = 0; k < d; ++k) {
    const int c = static_cast<int>((site / stride) % n);
    for (int delta : {-1, 1}) {
      const int moved = (c + delta + n) % n;
      out.push_back(site + (static_cast<std::size_t>(moved) - static_cast<std::size_t>(c)) * stride);
    }
    stride *= static_cast<std::size_t>(n);
  }
  return out;
}

int spin(std::size_t config, std::size_t site) { return (config >> site) & 1 ? 1 : -1; }

// Generator of single-site heat-bath dynamics at inverse temperature beta,
// built from scratch with dense storage.
Eigen::MatrixXd oracle_generator(int n, int d, double beta, double rate = 1.0) {
  std::size_t sites = 1;
  for (int k = 0; k < d; ++k) sites *= static_cast<std::size_t>(n);
  const std::size_t states = std::size_t{1} << sites;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  for (std::size_t x = 0; x < states; ++x) {
    for (std::size_t j = 0; j < sites; ++j) {
      int h = 0;
      for (auto k : oracle_neighbours(n, d, j)) h += spin(x, k);
      const int s = spin(x, j);
      // probability of drawing -s: e^{-beta s h} / (e^{beta s h} + e^{-beta s h})
      const double p = std::exp(-beta * s * h) / (std::exp(beta * s * h) + std::exp(-beta * s * h));
      const std::size_t y = x ^ (std::size_t{1} << j);
      q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = rate * p;
    }
    q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = -q.row(static_cast<Eigen::Index>(x)).sum();
  }
  return q;
}

SpinConfig random_config(std::mt19937_64& rng, std::size_t sites) {
  std::vector<int> s(sites);
  for (auto& v : s) v = (rng() & 1) ? 1 : -1;
  return SpinConfig(s);
}

}  // namespace

TEST(Lattice, Structure) {
  for (auto [n, d] : {std::pair{3, 1}, std::pair{3, 2}, std::pair{4, 2}, std::pair{3, 3}}) {
    const TorusLattice lat(n, d);
    EXPECT_EQ(lat.sites(), static_cast<std::size_t>(std::pow(n, d)));
    for (std::size_t i = 0; i < lat.sites(); ++i) {
      const auto& nb = lat.neighbours(i);
      EXPECT_EQ(std::set<std::size_t>(nb.begin(), nb.end()).size(), static_cast<std::size_t>(2 * d));
      const auto want = oracle_neighbours(n, d, i);
      EXPECT_EQ(std::set<std::size_t>(nb.begin(), nb.end()), std::set<std::size_t>(want.begin(), want.end()));
      for (auto j : nb) EXPECT_TRUE(lat.adjacent(j, i));
      EXPECT_EQ(lat.site_index(lat.coordinates(i)), i);
    }
  }
  EXPECT_THROW(TorusLattice(2, 2), ValidationError);
  EXPECT_THROW(TorusLattice(3, 0), ValidationError);
}

TEST(Lattice, AutomorphismsPreserveAdjacency) {
  const TorusLattice lat(3, 2);
  const auto group = lat.automorphisms();
  EXPECT_EQ(group.size(), 9u * 4u * 2u);
  for (const auto& g : group) {
    for (std::size_t i = 0; i < lat.sites(); ++i) {
      for (auto j : lat.neighbours(i)) EXPECT_TRUE(lat.adjacent(g[i], g[j]));
    }
  }
}

TEST(SpinConfig, EncodingAndValidation) {
  const auto x = SpinConfig::from_index(0b101, 3);
  EXPECT_EQ(x[0], 1);
  EXPECT_EQ(x[1], -1);
  EXPECT_EQ(x[2], 1);
  EXPECT_EQ(x.bitstring(), "101");
  EXPECT_EQ(x.index(), 5u);
  EXPECT_EQ(x.flipped(1).index(), 7u);
  EXPECT_THROW(SpinConfig({1, 0, -1}), ValidationError);
}

TEST(Hamiltonian, Examples) {
  const TorusLattice lat(3, 2);
  const IsingParams p(0.7);
  const auto plus = SpinConfig::all(9, 1);
  EXPECT_NEAR(hamiltonian(plus, lat, p), -18 * 0.7, 1e-12);
  EXPECT_NEAR(hamiltonian(plus.flipped(4), lat, p), -10 * 0.7, 1e-12);
  std::mt19937_64 rng(1);
  EXPECT_EQ(hamiltonian(random_config(rng, 9), lat, IsingParams(0.0)), 0.0);
  EXPECT_THROW(IsingParams(-0.1), ValidationError);
}

TEST(Hamiltonian, SymmetryAndLocalConsistency) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (auto [n, d] : {std::pair{3, 2}, std::pair{4, 1}, std::pair{3, 3}}) {
    const TorusLattice lat(n, d);
    for (int trial = 0; trial < 100; ++trial) {
      const IsingParams p(u(rng));
      const auto x = random_config(rng, lat.sites());
      std::vector<int> neg(x.spins());
      for (auto& v : neg) v = -v;
      EXPECT_NEAR(hamiltonian(x, lat, p), hamiltonian(SpinConfig(neg), lat, p), 1e-12);
      const std::size_t j = rng() % lat.sites();
      const auto xp = x.with_spin(j, 1);
      const auto xm = x.with_spin(j, -1);
      EXPECT_NEAR(local_hamiltonian(xm, j, lat, p), -local_hamiltonian(xp, j, lat, p), 1e-12);
      EXPECT_NEAR(hamiltonian(xm, lat, p) - hamiltonian(xp, lat, p),
                  local_hamiltonian(xm, j, lat, p) - local_hamiltonian(xp, j, lat, p), 1e-12);
    }
  }
}

TEST(LocalHamiltonian, Examples) {
  const TorusLattice lat(3, 2);
  const IsingParams p(0.4);
  const auto plus = SpinConfig::all(9, 1);
  for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(local_hamiltonian(plus, j, lat, p), -1.6, 1e-12);
  const auto nb = lat.neighbours(4);
  const auto three_one = plus.flipped(nb[0]);
  EXPECT_EQ(neighbour_sum(three_one, 4, lat), 2);
  EXPECT_NEAR(local_hamiltonian(three_one, 4, lat, p), -0.8, 1e-12);
  EXPECT_EQ(local_hamiltonian(three_one, 4, lat, IsingParams(0.0)), 0.0);
}

TEST(FlipProbability, Examples) {
  const TorusLattice lat(3, 2);
  const auto plus = SpinConfig::all(9, 1);
  EXPECT_DOUBLE_EQ(flip_probability(plus, 0, lat, IsingParams(0.0)), 0.5);
  EXPECT_NEAR(flip_probability(plus, 0, lat, IsingParams(0.5)), std::exp(2) / (std::exp(2) + std::exp(-2)),
              1e-14);
  EXPECT_NEAR(flip_probability(plus, 0, lat, IsingParams(0.5)), 0.98201, 1e-5);
  const auto nb = lat.neighbours(0);
  const auto balanced = plus.flipped(nb[0]).flipped(nb[1]);
  EXPECT_EQ(neighbour_sum(balanced, 0, lat), 0);
  EXPECT_DOUBLE_EQ(flip_probability(balanced, 0, lat, IsingParams(1.3)), 0.5);
  // Stable for very large beta.
  EXPECT_NEAR(flip_probability(plus, 0, lat, IsingParams(500.0)), 1.0, 1e-15);
}

TEST(Gibbs, Examples) {
  const TorusLattice lat(3, 2);
  const auto uni = gibbs_distribution(lat, IsingParams(0.0));
  EXPECT_NEAR(uni.weights().maxCoeff(), 1.0 / 512, 1e-15);
  EXPECT_NEAR(uni.weights().minCoeff(), 1.0 / 512, 1e-15);

  const TorusLattice ring(3, 1);
  const double beta = 0.9;
  const auto g = gibbs_distribution(ring, IsingParams(beta));
  EXPECT_NEAR(g[0], g[7], 1e-15);
  for (std::size_t x = 0; x < 8; ++x) {
    double edges = 0;
    for (std::size_t i = 0; i < 3; ++i) edges += spin(x, i) * spin(x, (i + 1) % 3);
    EXPECT_NEAR(g[x] / g[7], std::exp(beta * edges - beta * 3), 1e-12);
  }

  const Generator q = glauber_generator(lat, IsingParams(0.3));
  const auto pi = gibbs_distribution(lat, IsingParams(0.3));
  EXPECT_LE((pi.weights().transpose() * q.entries()).cwiseAbs().maxCoeff(), 1e-10);

  EXPECT_THROW(gibbs_distribution(TorusLattice(4, 2), IsingParams(0.1)), EnumerationCapExceeded);
}

TEST(Generator, MatchesIndependentConstructionAndDetailedBalance) {
  for (auto [n, d] : {std::pair{3, 1}, std::pair{3, 2}}) {
    const TorusLattice lat(n, d);
    for (double beta : {0.0, 0.25, 0.8}) {
      const Generator q = glauber_generator(lat, IsingParams(beta));
      EXPECT_LE((q.entries() - oracle_generator(n, d, beta)).cwiseAbs().maxCoeff(), 1e-14);
      const auto pi = gibbs_distribution(lat, IsingParams(beta));
      double worst = 0.0;
      for (Eigen::Index x = 0; x < q.entries().rows(); ++x) {
        EXPECT_NEAR(q.entries().row(x).sum(), 0.0, 1e-12);
        EXPECT_LE(-q(x, x), static_cast<double>(lat.sites()) + 1e-12);
        for (Eigen::Index y = 0; y < q.entries().cols(); ++y) {
          if (x != y) worst = std::max(worst, std::abs(pi[x] * q(x, y) - pi[y] * q(y, x)));
        }
      }
      EXPECT_LT(worst, 1e-10);
      if (beta == 0.0) {
        for (Eigen::Index x = 0; x < q.entries().rows(); ++x) EXPECT_DOUBLE_EQ(-q(x, x), lat.sites() * 0.5);
      }
    }
  }
}

TEST(Schedules, EndpointsAndOracleAgreement) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const double b1 = u(rng);
    const double b2 = u(rng);
    for (double a : {2.0, 4.0, 6.0}) {
      const auto phi = adiabatic_glauber_schedule(a, b1, b2);
      EXPECT_EQ(phi(0.0), 0.0);
      EXPECT_EQ(phi(1.0), 1.0);
      EXPECT_NEAR(derive_schedule_oracle(a, b1, b2, 0.0), 0.0, 1e-12);
      EXPECT_NEAR(derive_schedule_oracle(a, b1, b2, 1.0), 1.0, 1e-12);
      for (int k = 1; k < 100; ++k) {
        const double s = k / 100.0;
        EXPECT_NEAR(phi(s), derive_schedule_oracle(a, b1, b2, s), 1e-10);
      }
    }
  }
  EXPECT_NEAR(Schedule::glauber(2, 0.5, 0.2)(0.5), derive_schedule_oracle(2, 0.5, 0.2, 0.5), 1e-10);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_NEAR(glauber_schedule_value(4, 0.5, 0.2, k / 10.0), derive_schedule_oracle(4, 0.5, 0.2, k / 10.0),
                1e-10);
  }
  EXPECT_THROW(derive_schedule_oracle(0.0, 0.5, 0.2, 0.3), DegenerateClass);
  EXPECT_THROW(derive_schedule_oracle(2.0, 0.5, 0.5, 0.3), DegenerateClass);
  EXPECT_TRUE(adiabatic_glauber_schedule(2.0, 0.4, 0.4).degenerate());
}

// The ordering between the 4- and 2-coefficient schedules depends on the
// sign of beta1 - beta2: a=4 lies above a=2 when cooling (beta1 < beta2)
// and below it when heating.
TEST(Schedules, OrderingDependsOnDirection) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    double b1 = u(rng);
    double b2 = u(rng);
    if (std::abs(b1 - b2) < 1e-3) continue;
    const bool cooling = b1 < b2;
    for (int k = 1; k < 1000; ++k) {
      const double s = k / 1000.0;
      const double four = glauber_schedule_value(4, b1, b2, s);
      const double two = glauber_schedule_value(2, b1, b2, s);
      EXPECT_GE(four, 0.0);
      EXPECT_LE(four, 1.0);
      if (cooling) {
        EXPECT_GE(four, two - 1e-15);
      } else {
        EXPECT_LE(four, two + 1e-15);
      }
    }
  }
}

TEST(RateBound, Examples) {
  EXPECT_DOUBLE_EQ(torus_rate_bound(TorusLattice(3, 2)).value(), 9.0);
  EXPECT_DOUBLE_EQ(torus_rate_bound(TorusLattice(4, 3)).value(), 64.0);
  EXPECT_DOUBLE_EQ(torus_rate_bound(TorusLattice(3, 2), 1.0 / 9.0).value(), 1.0);
  EXPECT_THROW(torus_rate_bound(TorusLattice(3, 2), 0.0), ValidationError);
}

TEST(AssembledSpec, MatchesInterpolatedLocalHamiltonian) {
  const TorusLattice lat(3, 2);
  const double b1 = 0.2;
  const double b2 = 0.4;
  const auto built = build_adiabatic_glauber_spec(lat, b1, b2);
  EXPECT_FALSE(built.degenerate);
  EXPECT_DOUBLE_EQ(built.spec.rate_bound().value(), 9.0);
  for (int k = 0; k < 20; ++k) {
    const double s = k / 19.0;
    const Eigen::MatrixXd direct = oracle_generator(3, 2, (1 - s) * b1 + s * b2);
    EXPECT_LE((interpolate_generator(built.spec, s).entries() - direct).cwiseAbs().maxCoeff(), 1e-10)
        << "s = " << s;
  }
  const auto& mn = built.spec.schedules().min_schedule();
  for (int k = 0; k <= 1000; ++k) {
    const double s = k / 1000.0;
    EXPECT_NEAR(mn(s), glauber_schedule_value(2, b1, b2, s), 1e-15);
  }
  EXPECT_EQ(built.spec.schedules().flatness().order, 1);
}

TEST(AssembledSpec, RingUsesTwoCoefficientMinimum) {
  const TorusLattice lat(3, 1);
  const auto built = build_adiabatic_glauber_spec(lat, 0.1, 0.6);
  for (int k = 0; k <= 100; ++k) {
    EXPECT_NEAR(built.spec.schedules().min_schedule()(k / 100.0), glauber_schedule_value(2, 0.1, 0.6, k / 100.0),
                1e-15);
  }
}

TEST(AssembledSpec, DegenerateWhenBetasCoincide) {
  const auto built = build_adiabatic_glauber_spec(TorusLattice(3, 1), 0.5, 0.5);
  EXPECT_TRUE(built.degenerate);
  EXPECT_EQ(built.spec.initial_entries(), built.spec.final_entries());
}

TEST(AssembledSpec, OrbitRepresentativesCoverAllStates) {
  const TorusLattice lat(3, 2);
  const auto reps = orbit_representatives(lat);
  EXPECT_EQ(reps.size(), 13u);
  const auto built = build_adiabatic_glauber_spec(lat, 0.2, 0.4);
  EXPECT_EQ(built.spec.start_states(), reps);
}
