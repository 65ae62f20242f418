#pragma once

// Ising model on the torus Z^d / nZ^d with Glauber (heat-bath) dynamics.
//
// Site indexing: site = sum_k c_k n^k for coordinates c in [0,n)^d.
// Configuration indexing: bit i of the index is 1 iff site i has spin +1.

#include "adiabatic/markov.hpp"
#include "adiabatic/schedule.hpp"
#include "adiabatic/spec.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace adiabatic {

/// Largest lattice (in sites) whose configuration space is enumerated.
inline constexpr std::size_t kMaxEnumeratedSites = 12;

class TorusLattice {
 public:
  /// n >= 3 (n = 2 would double edges), d >= 1.
  TorusLattice(int n, int d);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  std::size_t sites() const noexcept { return neighbours_.size(); }
  std::size_t edges() const noexcept { return sites() * static_cast<std::size_t>(d_); }

  const std::vector<std::size_t>& neighbours(std::size_t site) const { return neighbours_.at(site); }
  bool adjacent(std::size_t i, std::size_t j) const;

  std::vector<int> coordinates(std::size_t site) const;
  std::size_t site_index(const std::vector<int>& coordinates) const;

  /// Site permutations from translations, axis reflections and axis
  /// permutations: n^d * 2^d * d! of them.
  std::vector<std::vector<std::size_t>> automorphisms() const;

 private:
  int n_;
  int d_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

class SpinConfig {
 public:
  /// Every entry must be exactly -1 or +1.
  explicit SpinConfig(std::vector<int> spins);
  static SpinConfig from_index(std::uint64_t index, std::size_t sites);
  static SpinConfig all(std::size_t sites, int spin);

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](std::size_t i) const { return spins_.at(i); }
  const std::vector<int>& spins() const noexcept { return spins_; }

  std::uint64_t index() const;
  SpinConfig flipped(std::size_t site) const;
  SpinConfig with_spin(std::size_t site, int spin) const;
  /// '1' for +1 and '0' for -1, site 0 first.
  std::string bitstring() const;

 private:
  std::vector<int> spins_;
};

enum class BetaRole { initial, final };

struct IsingParams {
  /// beta must be finite and >= 0.
  explicit IsingParams(double beta, BetaRole role = BetaRole::initial);
  double beta;
  BetaRole role;
};

/// -(beta/2) sum_{i != j} M_ij x(i) x(j), i.e. -beta times the edge sum.
double hamiltonian(const SpinConfig& x, const TorusLattice& lattice, const IsingParams& params);

/// -beta x(j) sum_{i ~ j} x(i)
double local_hamiltonian(const SpinConfig& x, std::size_t j, const TorusLattice& lattice,
                         const IsingParams& params);

/// Sum of the neighbouring spins of site j.
int neighbour_sum(const SpinConfig& x, std::size_t j, const TorusLattice& lattice);

/// Heat-bath probability that site j is reselected as +1:
/// (1 + tanh(beta * neighbour_sum)) / 2.
double flip_probability(const SpinConfig& x, std::size_t j, const TorusLattice& lattice,
                        const IsingParams& params);

/// Exact Gibbs measure by enumeration (log-sum-exp normalised).
/// Throws EnumerationCapExceeded above kMaxEnumeratedSites sites.
Distribution gibbs_distribution(const TorusLattice& lattice, const IsingParams& params);

/// Each site carries a clock of rate `per_site_rate`; at a ring the spin is
/// reselected from its conditional Gibbs law. The rate x -> x^(j) is
/// per_site_rate * P(reselect -x(j)).
Generator glauber_generator(const TorusLattice& lattice, const IsingParams& params,
                            double per_site_rate = 1.0);

/// Closed-form schedule for flips whose neighbour sum has magnitude a.
Schedule adiabatic_glauber_schedule(double a, double beta1, double beta2);

/// Independent derivation of the same schedule: rates from the interpolated
/// local Hamiltonian (1 - s) H_beta1 + s H_beta2, then
/// phi = (q[s] - q_init) / (q_final - q_init).
/// Throws DegenerateClass for a = 0 or beta1 = beta2.
double derive_schedule_oracle(double a, double beta1, double beta2, double s);

/// lambda = n^d * per_site_rate.
RateBound torus_rate_bound(const TorusLattice& lattice, double per_site_rate = 1.0);

/// Smallest configuration index in each orbit of the lattice automorphisms
/// combined with the global spin flip, in increasing order.
std::vector<std::size_t> orbit_representatives(const TorusLattice& lattice);

struct GlauberSpec {
  AdiabaticSpec spec;
  /// beta1 == beta2: initial and final generators coincide.
  bool degenerate;
};

/// Glauber generators at beta1 (initial) and beta2 (final), flips assigned to
/// the closed-form schedule of their neighbour-sum class (linear and inert for
/// sum 0), lambda = n^d * per_site_rate, and orbit representatives as starts.
GlauberSpec build_adiabatic_glauber_spec(const TorusLattice& lattice, double beta1, double beta2,
                                         double per_site_rate = 1.0);

}  // namespace adiabatic
