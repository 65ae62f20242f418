#pragma once

// Finite-state Markov chain primitives: probability vectors, transition
// kernels, rate matrices, total variation and stationary distributions.
//
// Distributions are row vectors acting on the left (mu * P), stored as
// Eigen column vectors. All types validate their invariants on construction
// and are immutable afterwards.

#include <Eigen/Dense>

#include <cstddef>

namespace adiabatic {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kRowSumTolerance = 1e-12;

class Distribution {
 public:
  /// Throws ValidationError unless every weight is >= 0 and the total is 1
  /// within `tolerance`.
  explicit Distribution(Eigen::VectorXd weights,
                        double tolerance = kMassTolerance);

  static Distribution point_mass(std::size_t dim, std::size_t state);
  static Distribution uniform(std::size_t dim);

  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(weights_.size());
  }
  double operator[](std::size_t i) const {
    return weights_[static_cast<Eigen::Index>(i)];
  }

 private:
  Eigen::VectorXd weights_;
};

/// Row-stochastic matrix: entries in [0,1], rows summing to 1.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Eigen::MatrixXd entries);

  static StochasticMatrix identity(std::size_t dim);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(entries_.rows());
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Eigen::MatrixXd entries_;
};

/// Rate matrix of a continuous-time chain: off-diagonals >= 0, rows sum to 0.
class Generator {
 public:
  explicit Generator(Eigen::MatrixXd entries);

  static Generator zero(std::size_t dim);
  /// Builds a generator from off-diagonal rates; the diagonal of `rates` is
  /// ignored and replaced by minus the row sum.
  static Generator from_rates(Eigen::MatrixXd rates);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(entries_.rows());
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// max_i sum_{j != i} q_ij
  double max_exit_rate() const;

 private:
  Eigen::MatrixXd entries_;
};

/// Uniformization constant lambda (1/time).
class RateBound {
 public:
  explicit RateBound(double lambda);

  /// Smallest bound certifying `q`: its maximal exit rate.
  static RateBound for_generator(const Generator& q);

  double value() const noexcept { return lambda_; }
  bool certifies(const Generator& q) const;

 private:
  double lambda_;
};

/// Half the L1 distance.
double tv_distance(const Distribution& mu, const Distribution& nu);

/// Stationary distribution with a uniqueness check on the null space of
/// (P - I)^T. Throws NonUniqueStationary when the null space has dimension
/// > 1, StationarySolveError when the residual ||pi P - pi||_1 exceeds tol.
Distribution stationary_distribution(const StochasticMatrix& p,
                                     double tol = 1e-10);
/// Same for pi Q = 0.
Distribution stationary_distribution(const Generator& q, double tol = 1e-10);

/// mu * P
Distribution step_distribution(const Distribution& mu,
                               const StochasticMatrix& p);

/// mu * exp(t Q) by uniformization over P1 = I + Q / lambda, with L1
/// truncation error at most `tol`. Throws InvalidRateBound when lambda is
/// below the maximal exit rate of `q`.
Distribution transient_distribution(const Distribution& mu, const Generator& q,
                                    double t, const RateBound& lambda,
                                    double tol = 1e-12);

/// Row-block form of transient_distribution: every row of `rows` is a
/// probability vector and is propagated independently.
Eigen::MatrixXd transient_rows(const Eigen::MatrixXd& rows, const Generator& q,
                               double t, const RateBound& lambda,
                               double tol = 1e-12);

/// max over rows of half the L1 distance between the row and `target`.
double max_row_tv(const Eigen::MatrixXd& rows, const Eigen::VectorXd& target);

}  // namespace adiabatic
