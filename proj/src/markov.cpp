#include "adiabatic/markov.hpp"

#include "adiabatic/errors.hpp"
#include "uniformization.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace adiabatic {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": entries must be finite");
  }
}

double row_tolerance(const Eigen::MatrixXd& m, Eigen::Index i) {
  return kRowSumTolerance * std::max(1.0, m.row(i).cwiseAbs().sum());
}

// Null-space check and normalised solve of A pi = 0, 1^T pi = 1 where A is
// (P - I)^T or Q^T.
Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(a);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() < n - 1) {
    throw NonUniqueStationary("stationary distribution is not unique (null space dimension " +
                              std::to_string(n - rank_qr.rank()) + ")");
  }
  Eigen::MatrixXd augmented(n + 1, n);
  augmented.topRows(n) = a;
  augmented.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  Eigen::VectorXd pi = augmented.colPivHouseholderQr().solve(rhs);
  return pi;
}

Distribution finish_stationary(Eigen::VectorXd pi, const Eigen::VectorXd& residual,
                               double tol) {
  if (!pi.allFinite()) throw StationarySolveError("stationary solve produced non-finite values");
  if (pi.minCoeff() < -std::max(tol, 1e-9)) {
    throw StationarySolveError("stationary solve produced a negative weight");
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  if (residual.lpNorm<1>() > tol) {
    throw StationarySolveError("stationary residual " + std::to_string(residual.lpNorm<1>()) +
                               " exceeds tolerance");
  }
  return Distribution(std::move(pi));
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd weights, double tolerance)
    : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("Distribution: empty weight vector");
  if (!weights_.allFinite()) throw ValidationError("Distribution: weights must be finite");
  if (weights_.minCoeff() < 0.0) {
    throw ValidationError("Distribution: negative weight " + std::to_string(weights_.minCoeff()));
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > tolerance) {
    throw ValidationError("Distribution: weights sum to " + std::to_string(total));
  }
}

Distribution Distribution::point_mass(std::size_t dim, std::size_t state) {
  if (state >= dim) throw ValidationError("point_mass: state out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  w[static_cast<Eigen::Index>(state)] = 1.0;
  return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t dim) {
  if (dim == 0) throw ValidationError("uniform: empty state space");
  return Distribution(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim),
                                                1.0 / static_cast<double>(dim)));
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_square(entries_, "StochasticMatrix");
  if (entries_.minCoeff() < 0.0 || entries_.maxCoeff() > 1.0) {
    throw ValidationError("StochasticMatrix: entries must lie in [0,1]");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    const double sum = entries_.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance * static_cast<double>(entries_.cols())) {
      throw ValidationError("StochasticMatrix: row " + std::to_string(i) + " sums to " +
                            std::to_string(sum));
    }
  }
}

StochasticMatrix StochasticMatrix::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return StochasticMatrix(Eigen::MatrixXd::Identity(n, n));
}

Generator::Generator(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_square(entries_, "Generator");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (i != j && entries_(i, j) < 0.0) {
        throw ValidationError("Generator: negative off-diagonal rate at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
    }
    const double sum = entries_.row(i).sum();
    if (std::abs(sum) > row_tolerance(entries_, i)) {
      throw ValidationError("Generator: row " + std::to_string(i) + " sums to " +
                            std::to_string(sum));
    }
  }
}

Generator Generator::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Generator(Eigen::MatrixXd::Zero(n, n));
}

Generator Generator::from_rates(Eigen::MatrixXd rates) {
  require_square(rates, "Generator::from_rates");
  rates.diagonal().setZero();
  for (Eigen::Index i = 0; i < rates.rows(); ++i) rates(i, i) = -rates.row(i).sum();
  return Generator(std::move(rates));
}

double Generator::max_exit_rate() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    best = std::max(best, entries_.row(i).sum() - entries_(i, i));
  }
  return best;
}

RateBound::RateBound(double lambda) : lambda_(lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("RateBound: lambda must be finite and >= 0");
  }
}

RateBound RateBound::for_generator(const Generator& q) { return RateBound(q.max_exit_rate()); }

bool RateBound::certifies(const Generator& q) const {
  return lambda_ >= q.max_exit_rate() * (1.0 - 1e-14);
}

double tv_distance(const Distribution& mu, const Distribution& nu) {
  if (mu.dim() != nu.dim()) {
    throw DimensionMismatch("tv_distance: dimensions " + std::to_string(mu.dim()) + " and " +
                            std::to_string(nu.dim()));
  }
  return std::min(1.0, 0.5 * (mu.weights() - nu.weights()).lpNorm<1>());
}

double max_row_tv(const Eigen::MatrixXd& rows, const Eigen::VectorXd& target) {
  if (rows.cols() != target.size()) throw DimensionMismatch("max_row_tv: dimension mismatch");
  double worst = 0.0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    worst = std::max(worst, 0.5 * (rows.row(r).transpose() - target).lpNorm<1>());
  }
  return std::min(1.0, worst);
}

Distribution stationary_distribution(const StochasticMatrix& p, double tol) {
  if (!(tol > 0.0)) throw ValidationError("stationary_distribution: tol must be > 0");
  const auto n = static_cast<Eigen::Index>(p.dim());
  Eigen::MatrixXd a = (p.entries() - Eigen::MatrixXd::Identity(n, n)).transpose();
  Eigen::VectorXd pi = solve_stationary(a);
  Eigen::VectorXd clean = pi.cwiseMax(0.0);
  clean /= clean.sum();
  const Eigen::VectorXd residual = p.entries().transpose() * clean - clean;
  return finish_stationary(std::move(pi), residual, tol);
}

Distribution stationary_distribution(const Generator& q, double tol) {
  if (!(tol > 0.0)) throw ValidationError("stationary_distribution: tol must be > 0");
  Eigen::MatrixXd a = q.entries().transpose();
  Eigen::VectorXd pi = solve_stationary(a);
  Eigen::VectorXd clean = pi.cwiseMax(0.0);
  clean /= clean.sum();
  // Residual measured in units of the uniformized kernel so the tolerance is
  // scale-free.
  const double lambda = std::max(q.max_exit_rate(), 1e-300);
  const Eigen::VectorXd residual = (q.entries().transpose() * clean) / lambda;
  return finish_stationary(std::move(pi), residual, tol);
}

Distribution step_distribution(const Distribution& mu, const StochasticMatrix& p) {
  if (mu.dim() != p.dim()) throw DimensionMismatch("step_distribution: dimension mismatch");
  return Distribution(p.entries().transpose() * mu.weights(), 1e-10);
}

namespace detail {

std::size_t poisson_truncation(double mean, double tail) {
  if (mean <= 0.0) return 0;
  auto tail_after = [mean](std::size_t k) {
    return boost::math::gamma_p(static_cast<double>(k) + 1.0, mean);
  };
  if (tail_after(0) < tail) return 0;
  std::size_t lo = 0;
  std::size_t hi = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(mean)));
  while (tail_after(hi) >= tail) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_after(mid) < tail) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

namespace {

Eigen::MatrixXd uniformize_segment(const Eigen::MatrixXd& rows, const RowOperator& p1,
                                   double mean, double tol) {
  if (mean == 0.0) return rows;
  const std::size_t order = poisson_truncation(mean, 0.5 * tol);
  const double log_mean = std::log(mean);
  Eigen::MatrixXd term = rows;
  Eigen::MatrixXd next(rows.rows(), rows.cols());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows.rows(), rows.cols());
  double kept = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double weight = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    acc += weight * term;
    kept += weight;
    if (k == order) break;
    p1.apply(term, next);
    term.swap(next);
  }
  return acc / kept;
}

}  // namespace

Eigen::MatrixXd uniformize_rows(const Eigen::MatrixXd& rows, const RowOperator& p1,
                                double mean, double tol) {
  if (mean <= 700.0) return uniformize_segment(rows, p1, mean, tol);
  const auto segments = static_cast<std::size_t>(std::ceil(mean / 50.0));
  const double piece = mean / static_cast<double>(segments);
  const double piece_tol = tol / static_cast<double>(segments);
  Eigen::MatrixXd current = rows;
  for (std::size_t s = 0; s < segments; ++s) {
    current = uniformize_segment(current, p1, piece, piece_tol);
  }
  return current;
}

RowOperator uniformized_kernel(const Eigen::MatrixXd& generator, double lambda) {
  const auto n = generator.rows();
  Eigen::MatrixXd p1 = Eigen::MatrixXd::Identity(n, n) + generator / lambda;
  // Guard against -0.0 / tiny negative rounding on the diagonal.
  for (Eigen::Index i = 0; i < n; ++i) p1(i, i) = std::max(0.0, p1(i, i));
  return RowOperator::from_dense(p1, true);
}

}  // namespace detail

Eigen::MatrixXd transient_rows(const Eigen::MatrixXd& rows, const Generator& q, double t,
                               const RateBound& lambda, double tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("transient: t must be finite and >= 0");
  if (!(tol > 0.0)) throw ValidationError("transient: tol must be > 0");
  if (static_cast<std::size_t>(rows.cols()) != q.dim()) {
    throw DimensionMismatch("transient: dimension mismatch");
  }
  if (!lambda.certifies(q)) {
    throw InvalidRateBound("lambda " + std::to_string(lambda.value()) +
                           " is below the maximal exit rate " + std::to_string(q.max_exit_rate()));
  }
  if (t == 0.0 || lambda.value() == 0.0) return rows;
  const RowOperator p1 = detail::uniformized_kernel(q.entries(), lambda.value());
  return detail::uniformize_rows(rows, p1, lambda.value() * t, tol);
}

Distribution transient_distribution(const Distribution& mu, const Generator& q, double t,
                                    const RateBound& lambda, double tol) {
  Eigen::MatrixXd rows = mu.weights().transpose();
  Eigen::MatrixXd out = transient_rows(rows, q, t, lambda, tol);
  Eigen::VectorXd w = out.row(0).transpose();
  return Distribution(w.cwiseMax(0.0), 1e-10);
}

}  // namespace adiabatic
