#pragma once

// An adiabatic evolution: initial and final kernels (or generators), a
// per-entry schedule family, and for continuous time a rate bound.

#include "adiabatic/markov.hpp"
#include "adiabatic/row_operator.hpp"
#include "adiabatic/schedule.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace adiabatic {

enum class Mode { discrete, continuous };

std::string to_string(Mode mode);

/// Sparse form of the interpolated operator over the union support of the
/// initial and final matrices. Filling at s writes
///   (1 - phi_ij(s)) a_ij + phi_ij(s) b_ij
/// into every stored entry; for generators the diagonal is then set to minus
/// the off-diagonal row sum.
class InterpolatedOperator {
 public:
  InterpolatedOperator(Mode mode, const Eigen::MatrixXd& initial,
                       const Eigen::MatrixXd& final, const ScheduleFamily& family);

  Mode mode() const noexcept { return mode_; }
  std::size_t dim() const noexcept { return pattern_.dim(); }
  std::size_t nonzeros() const noexcept { return pattern_.nonzeros(); }

  /// A RowOperator with the right pattern; pass it to fill().
  RowOperator make_operator() const { return pattern_; }

  /// Writes the interpolated values at s into `op`. `slot_values` is scratch.
  /// Discrete mode checks row sums against 1 within 1e-10 and throws
  /// InconsistentSchedules otherwise.
  void fill(double s, std::vector<double>& slot_values, RowOperator& op) const;

  /// Off-diagonal rates of row `i` at schedule values `slot_values`
  /// (generator mode). Calls f(j, rate) for each stored off-diagonal entry.
  template <typename F>
  void for_each_rate(std::size_t i, const std::vector<double>& slot_values, F&& f) const {
    const auto& starts = pattern_.row_starts();
    const auto& cols = pattern_.cols();
    for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
      if (cols[k] == i) continue;
      const double phi = slot_values[slot_[k]];
      f(cols[k], (1.0 - phi) * initial_[k] + phi * final_[k]);
    }
  }

  /// Jump target from row `i` for a uniform draw u in [0, rate bound): the
  /// first j whose cumulative rate exceeds u, or dim() for no jump.
  std::size_t pick(std::size_t i, const std::vector<double>& slot_values, double u) const;

  const ScheduleFamily& family() const noexcept { return family_; }

 private:
  Mode mode_;
  RowOperator pattern_;
  std::vector<double> initial_;
  std::vector<double> final_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::size_t> diagonal_;
  ScheduleFamily family_;
};

class AdiabaticSpec {
 public:
  /// Throws DimensionMismatch, ValidationError (inert slot on an entry whose
  /// initial and final values differ) and NonUniqueStationary (final kernel).
  static AdiabaticSpec discrete(StochasticMatrix initial, StochasticMatrix final,
                                ScheduleFamily family = ScheduleFamily());
  /// `lambda` must certify both generators (InvalidRateBound otherwise).
  static AdiabaticSpec continuous(Generator initial, Generator final,
                                  ScheduleFamily family, RateBound lambda);
  static AdiabaticSpec continuous(Generator initial, Generator final,
                                  ScheduleFamily family = ScheduleFamily());

  Mode mode() const noexcept { return data_->mode; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_->initial.rows()); }

  const Eigen::MatrixXd& initial_entries() const noexcept { return data_->initial; }
  const Eigen::MatrixXd& final_entries() const noexcept { return data_->final; }
  StochasticMatrix initial_kernel() const;
  StochasticMatrix final_kernel() const;
  Generator initial_generator() const;
  Generator final_generator() const;

  const ScheduleFamily& schedules() const noexcept { return data_->op.family(); }
  const RateBound& rate_bound() const;
  /// Dominating rate for every interpolated generator:
  /// max(lambda, max_i sum_{j != i} max(q^init_ij, q^final_ij)).
  /// Equals lambda when every schedule is the same.
  double uniform_rate() const noexcept { return data_->uniform_rate; }

  const Distribution& final_stationary() const noexcept { return data_->pi_final; }

  /// Starting states over which worst-case quantities are maximised. All
  /// states by default; symmetric models may restrict to orbit
  /// representatives.
  const std::vector<std::size_t>& start_states() const noexcept { return starts_; }
  AdiabaticSpec with_start_states(std::vector<std::size_t> starts) const;

  const InterpolatedOperator& interpolated() const noexcept { return data_->op; }

 private:
  struct Data {
    Mode mode;
    Eigen::MatrixXd initial;
    Eigen::MatrixXd final;
    std::optional<RateBound> lambda;
    double uniform_rate = 0.0;
    Distribution pi_final;
    InterpolatedOperator op;
  };
  AdiabaticSpec(std::shared_ptr<const Data> data, std::vector<std::size_t> starts);

  std::shared_ptr<const Data> data_;
  std::vector<std::size_t> starts_;
};

/// Entrywise (1 - phi_ij(s)) p^init_ij + phi_ij(s) p^final_ij. Throws
/// InconsistentSchedules when a row sum leaves 1 by more than 1e-10.
StochasticMatrix interpolate_kernel(const AdiabaticSpec& spec, double s);

/// Off-diagonals interpolated as above, diagonal = -(row sum).
Generator interpolate_generator(const AdiabaticSpec& spec, double s);

struct HatDecomposition {
  std::variant<StochasticMatrix, Generator> hat;
  double phi_min;
};

/// hat with interpolate(spec, s) = (1 - phi(s)) hat + phi(s) final, where phi
/// is the family's pointwise minimum. Throws DegenerateDecomposition when
/// phi(s) = 1 (in particular for s = 1).
HatDecomposition decompose_hat(const AdiabaticSpec& spec, double s);

}  // namespace adiabatic
