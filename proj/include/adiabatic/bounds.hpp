#pragma once

// Evaluators for the adiabatic-time bounds, the shift-example lower bounds,
// the torus constant, the Faulhaber sum, and power-law fits.

#include "adiabatic/schedule.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace adiabatic {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

enum class BoundKind { upper_order, explicit_upper, lower };

std::string to_string(BoundKind kind);

struct BoundReport {
  std::string name;
  double value;
  BoundKind kind;
  std::vector<std::pair<std::string, double>> parameters;
  std::string notes;

  /// "key=value;key=value" with 17 significant digits.
  std::string parameter_string() const;
};

/// B_0 .. B_k as exact rationals, with B_1 = -1/2.
std::vector<BigRational> bernoulli_table(int k);

/// sum_{j=1}^{n-1} j^k from the Bernoulli closed form, exactly. n >= 1, 0 <= k <= 20.
BigInt faulhaber_sum(long n, int k);

/// prefactor * t_mix^{(m+1)/m} / epsilon^{1/m}
BoundReport discrete_adiabatic_bound(double t_mix, double epsilon, int m, double prefactor = 1.0);

/// prefactor * (lambda/epsilon)^{1/m} * t_mix^{(m+1)/m}
BoundReport continuous_adiabatic_bound(double t_mix, double epsilon, int m, double lambda,
                                       double prefactor = 1.0);

/// lambda t_mix^2 / epsilon + t_mix + epsilon / (4 lambda)
BoundReport kovchegov_continuous_explicit(double t_mix, double epsilon, double lambda);

/// Exact: 1 - prod_{j=T-n+1}^{T-1} j/T. Relaxed: 1 - exp(-n^2 / (4T)).
/// Requires T >= n >= 2.
double shift_example_lower_bound(long n, long T, bool exact);

/// 1 - prod_{j=T-n+1}^{T} phi(j/T); 1 when a factor vanishes.
double general_schedule_lower_bound(long n, long T, const Schedule& phi);

/// Smallest T allowed by the relaxed shift bound: -n^2 / (4 log(1 - epsilon)).
double shift_example_horizon(long n, double epsilon);

/// x [coth x + tanh(2 beta2)] / (1 - tanh(2 beta2))^2 with x = 2 beta1 - 2 beta2;
/// continuous at beta1 = beta2 where it equals 1 / (1 - tanh(2 beta2))^2.
double torus_constant_C(double beta1, double beta2);

/// prefactor * C * (N / epsilon) * [log n + log(2/epsilon)]^2 with N = n^d,
/// or n^{2d} when `rescaled`.
BoundReport torus_adiabatic_bound(int n, int d, double epsilon, double beta1, double beta2,
                                  bool rescaled, double prefactor = 1.0);

struct ScalingFit {
  std::vector<std::array<double, 2>> samples;
  double exponent;
  double log_prefactor;
  double r_squared;
};

/// Least squares on (log x, log y). Needs >= 3 samples, all positive, with at
/// least two distinct x.
ScalingFit fit_scaling_exponent(const std::vector<std::array<double, 2>>& samples);

}  // namespace adiabatic
