#pragma once

// Exact evolution of inhomogeneous chains, mixing and adiabatic time
// measurement, trajectory diagnostics and path sampling.

#include "adiabatic/markov.hpp"
#include "adiabatic/spec.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace adiabatic {

/// nu P_{1/T} P_{2/T} ... P_1 (P_{1/T} applied first). Requires T >= 1.
Distribution evolve_discrete(const AdiabaticSpec& spec, const Distribution& nu, long T);
/// Row-block form: each row of `rows` is evolved independently.
Eigen::MatrixXd evolve_discrete_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows, long T);

/// Solves d mu/dt = mu Q(t/T) on [0, T] by classical RK4 with step doubling
/// (step <= min(0.1/lambda, T/1000)); `tol` is the global L1 budget.
Distribution evolve_continuous(const AdiabaticSpec& spec, const Distribution& nu, double T,
                               double tol = 1e-8);
Eigen::MatrixXd evolve_continuous_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows,
                                       double T, double tol = 1e-8);

/// Independent check for evolve_continuous: Q(t/T) frozen at the midpoint of
/// each of `pieces` equal intervals, each piece applied by uniformization.
Distribution evolve_continuous_frozen(const AdiabaticSpec& spec, const Distribution& nu,
                                      double T, std::size_t pieces, double tol = 1e-12);
Eigen::MatrixXd evolve_continuous_frozen_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows,
                                              double T, std::size_t pieces, double tol = 1e-12);

struct EvolutionResult {
  /// Final distribution from the worst start.
  Distribution final_distribution;
  double horizon;
  double worst_case_tv;
  std::size_t worst_start;
  std::vector<std::size_t> starts;
  std::vector<double> per_start_tv;
};

/// Evolves every start state of the spec to horizon T and measures TV to the
/// final stationary distribution. Discrete specs need an integer T >= 1.
EvolutionResult worst_case_evolution(const AdiabaticSpec& spec, double T, double tol = 1e-8);

struct MixingOptions {
  /// Continuous time only; defaults to the generator's maximal exit rate.
  std::optional<RateBound> lambda;
  /// Continuous time: scan this grid before bisecting; default is doubling
  /// from 1/lambda.
  std::optional<double> time_grid;
  /// Point-mass starts; empty means all states.
  std::vector<std::size_t> starts;
  /// Discrete step cap; continuous cap on grid probes.
  long cap = 1'000'000;
  double max_time = 1e9;
  double rel_precision = 1e-3;
  double tol = 1e-12;
};

/// Smallest t >= 0 with max over point-mass starts of TV(delta_x P^t, pi) <= epsilon.
long mixing_time(const StochasticMatrix& p, double epsilon, const MixingOptions& options = {});
/// Continuous analogue, resolved to relative precision options.rel_precision.
double mixing_time(const Generator& q, double epsilon, const MixingOptions& options = {});

struct SearchOptions {
  double tol = 1e-8;
  /// Replaces the default starting horizon t_mix(final, epsilon).
  std::optional<double> initial_horizon;
  double max_horizon = 1e8;
  std::size_t max_evaluations = 200;
  double rel_precision = 1e-3;
  /// Re-check the answer at T and 2T.
  bool verify = true;
};

struct Probe {
  double horizon;
  double worst_case_tv;
};

struct SearchReport {
  double measured_time;
  double epsilon;
  std::pair<double, double> bracket;
  bool monotonicity_flag;
  std::size_t evaluations;
  double worst_case_tv;
  std::vector<Probe> probes;
};

/// Least horizon T with worst-case TV(final, pi_final) <= epsilon: doubling
/// upward from t_mix(final, epsilon), then bisection (integers for discrete
/// specs, relative precision for continuous ones). The flag is set when a
/// larger probed horizon fails after a smaller one passed.
SearchReport adiabatic_time(const AdiabaticSpec& spec, double epsilon,
                            const SearchOptions& options = {});

struct DeviationProfile {
  double sup_deviation;
  std::vector<double> times;
  std::vector<double> deviation;
};

/// TV(mu_t, pi_t) on a grid of `grid_points` times in [0, T], where mu_0 is
/// the stationary distribution of the initial kernel and pi_t that of the
/// frozen kernel at s = t/T. NonUniqueStationary carries the offending s.
DeviationProfile trajectory_deviation(const AdiabaticSpec& spec, double T,
                                      std::size_t grid_points, double tol = 1e-8);

struct SamplePath {
  std::size_t final_state;
  /// Times of accepted jumps, strictly increasing in (0, T].
  std::vector<double> event_times;
};

/// One path of the continuous chain from `start`, by thinning a Poisson
/// process at spec.uniform_rate(). The stream is mt19937_64 seeded from
/// splitmix64(seed).
SamplePath sample_path(const AdiabaticSpec& spec, double T, std::uint64_t seed,
                       std::size_t start = 0);

/// Final-state counts over `paths` paths; path k uses splitmix64(seed) ^ k,
/// so the result does not depend on `threads`.
std::vector<std::uint64_t> sample_final_counts(const AdiabaticSpec& spec, double T,
                                               std::size_t paths, std::uint64_t seed,
                                               std::size_t start = 0, unsigned threads = 1);

}  // namespace adiabatic
