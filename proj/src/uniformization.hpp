#pragma once

#include "adiabatic/row_operator.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace adiabatic::detail {

/// Smallest K with P(N > K) < tail for N ~ Poisson(mean).
std::size_t poisson_truncation(double mean, double tail);

/// rows * sum_k Poisson(mean; k) P1^k, truncated with L1 error <= tol and
/// renormalised by the retained Poisson mass. `p1` must be stochastic.
/// Means above 700 are split into segments of mean <= 50.
Eigen::MatrixXd uniformize_rows(const Eigen::MatrixXd& rows,
                                const RowOperator& p1, double mean, double tol);

/// P1 = I + Q / lambda as a row operator over the pattern of Q plus diagonal.
RowOperator uniformized_kernel(const Eigen::MatrixXd& generator, double lambda);

}  // namespace adiabatic::detail
