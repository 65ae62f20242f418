#include "adiabatic/spec.hpp"

#include "adiabatic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adiabatic {

namespace {

constexpr double kInterpolationRowTolerance = 1e-10;

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

void check_inert_entries(Mode mode, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const ScheduleFamily& family) {
  auto differs = [&](Eigen::Index i, Eigen::Index j) {
    if (mode == Mode::continuous && i == j) return false;
    return a(i, j) != b(i, j);
  };
  auto fail = [](std::size_t i, std::size_t j) {
    std::ostringstream msg;
    msg << "inert schedule assigned to entry (" << i << ", " << j
        << ") whose initial and final values differ";
    throw ValidationError(msg.str());
  };
  if (family.slot_inert(ScheduleFamily::kDefaultSlot)) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        if (family.slot_of(ui, uj) == ScheduleFamily::kDefaultSlot && differs(i, j)) fail(ui, uj);
      }
    }
  }
  for (const auto& [key, slot] : family.overrides()) {
    const auto i = static_cast<std::size_t>(key >> 32);
    const auto j = static_cast<std::size_t>(key & 0xffffffffULL);
    if (i >= static_cast<std::size_t>(a.rows()) || j >= static_cast<std::size_t>(a.cols())) {
      throw DimensionMismatch("schedule family refers to an entry outside the state space");
    }
    if (family.slot_inert(slot) && differs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) {
      fail(i, j);
    }
  }
}

double dominating_rate(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += std::max(a(i, j), b(i, j));
    }
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::discrete ? "discrete" : "continuous"; }

InterpolatedOperator::InterpolatedOperator(Mode mode, const Eigen::MatrixXd& initial,
                                           const Eigen::MatrixXd& final,
                                           const ScheduleFamily& family)
    : mode_(mode), family_(family) {
  BoolMatrix pattern = (initial.array() != 0.0 || final.array() != 0.0).matrix();
  if (mode == Mode::continuous) {
    for (Eigen::Index i = 0; i < pattern.rows(); ++i) pattern(i, i) = true;
  }
  pattern_ = RowOperator(initial, pattern);
  const auto& starts = pattern_.row_starts();
  const auto& cols = pattern_.cols();
  initial_.resize(cols.size());
  final_.resize(cols.size());
  slot_.resize(cols.size());
  diagonal_.assign(pattern_.dim(), 0);
  for (std::size_t i = 0; i < pattern_.dim(); ++i) {
    for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
      const std::size_t j = cols[k];
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      initial_[k] = initial(ei, ej);
      final_[k] = final(ei, ej);
      slot_[k] = static_cast<std::uint32_t>(family.slot_of(i, j));
      if (i == j) diagonal_[i] = k;
    }
  }
}

void InterpolatedOperator::fill(double s, std::vector<double>& slot_values,
                                RowOperator& op) const {
  family_.evaluate_slots(s, slot_values);
  auto& values = op.values();
  const auto& starts = pattern_.row_starts();
  const auto& cols = pattern_.cols();
  for (std::size_t i = 0; i < pattern_.dim(); ++i) {
    double sum = 0.0;
    for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
      if (mode_ == Mode::continuous && cols[k] == i) continue;
      const double phi = slot_values[slot_[k]];
      values[k] = (1.0 - phi) * initial_[k] + phi * final_[k];
      sum += values[k];
    }
    if (mode_ == Mode::continuous) {
      values[diagonal_[i]] = -sum;
    } else if (std::abs(sum - 1.0) > kInterpolationRowTolerance) {
      std::ostringstream msg;
      msg << "interpolated row " << i << " sums to " << sum << " at s = " << s
          << "; per-entry schedules are inconsistent with the kernels";
      throw InconsistentSchedules(msg.str());
    }
  }
}

std::size_t InterpolatedOperator::pick(std::size_t i, const std::vector<double>& slot_values,
                                       double u) const {
  const auto& starts = pattern_.row_starts();
  const auto& cols = pattern_.cols();
  double acc = 0.0;
  for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
    if (cols[k] == i) continue;
    const double phi = slot_values[slot_[k]];
    acc += (1.0 - phi) * initial_[k] + phi * final_[k];
    if (u < acc) return cols[k];
  }
  return pattern_.dim();
}

AdiabaticSpec::AdiabaticSpec(std::shared_ptr<const Data> data, std::vector<std::size_t> starts)
    : data_(std::move(data)), starts_(std::move(starts)) {}

AdiabaticSpec AdiabaticSpec::discrete(StochasticMatrix initial, StochasticMatrix final,
                                      ScheduleFamily family) {
  if (initial.dim() != final.dim()) {
    throw DimensionMismatch("initial and final kernels differ in dimension");
  }
  check_inert_entries(Mode::discrete, initial.entries(), final.entries(), family);
  Distribution pi = stationary_distribution(final);
  InterpolatedOperator op(Mode::discrete, initial.entries(), final.entries(), family);
  auto data = std::make_shared<const Data>(Data{Mode::discrete, initial.entries(), final.entries(),
                                                std::nullopt, 0.0, std::move(pi), std::move(op)});
  std::vector<std::size_t> starts(initial.dim());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  return AdiabaticSpec(std::move(data), std::move(starts));
}

AdiabaticSpec AdiabaticSpec::continuous(Generator initial, Generator final, ScheduleFamily family,
                                        RateBound lambda) {
  if (initial.dim() != final.dim()) {
    throw DimensionMismatch("initial and final generators differ in dimension");
  }
  if (!lambda.certifies(initial) || !lambda.certifies(final)) {
    throw InvalidRateBound("rate bound " + std::to_string(lambda.value()) +
                           " does not dominate the exit rates of both generators");
  }
  check_inert_entries(Mode::continuous, initial.entries(), final.entries(), family);
  Distribution pi = stationary_distribution(final);
  const double rate = std::max(lambda.value(), dominating_rate(initial.entries(), final.entries()));
  InterpolatedOperator op(Mode::continuous, initial.entries(), final.entries(), family);
  auto data = std::make_shared<const Data>(Data{Mode::continuous, initial.entries(),
                                                final.entries(), lambda, rate, std::move(pi),
                                                std::move(op)});
  std::vector<std::size_t> starts(initial.dim());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  return AdiabaticSpec(std::move(data), std::move(starts));
}

AdiabaticSpec AdiabaticSpec::continuous(Generator initial, Generator final,
                                        ScheduleFamily family) {
  const RateBound lambda(std::max(initial.max_exit_rate(), final.max_exit_rate()));
  return continuous(std::move(initial), std::move(final), std::move(family), lambda);
}

StochasticMatrix AdiabaticSpec::initial_kernel() const {
  if (mode() != Mode::discrete) throw ValidationError("spec is not in discrete mode");
  return StochasticMatrix(data_->initial);
}

StochasticMatrix AdiabaticSpec::final_kernel() const {
  if (mode() != Mode::discrete) throw ValidationError("spec is not in discrete mode");
  return StochasticMatrix(data_->final);
}

Generator AdiabaticSpec::initial_generator() const {
  if (mode() != Mode::continuous) throw ValidationError("spec is not in continuous mode");
  return Generator(data_->initial);
}

Generator AdiabaticSpec::final_generator() const {
  if (mode() != Mode::continuous) throw ValidationError("spec is not in continuous mode");
  return Generator(data_->final);
}

const RateBound& AdiabaticSpec::rate_bound() const {
  if (!data_->lambda) throw ValidationError("spec is not in continuous mode");
  return *data_->lambda;
}

AdiabaticSpec AdiabaticSpec::with_start_states(std::vector<std::size_t> starts) const {
  if (starts.empty()) throw ValidationError("start state set must be non-empty");
  for (auto s : starts) {
    if (s >= dim()) throw ValidationError("start state out of range");
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return AdiabaticSpec(data_, std::move(starts));
}

namespace {

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ValidationError("schedule parameter s = " + std::to_string(s) + " outside [0,1]");
  }
}

Eigen::MatrixXd interpolated_dense(const AdiabaticSpec& spec, double s) {
  const auto& op = spec.interpolated();
  RowOperator values = op.make_operator();
  std::vector<double> slots;
  op.fill(s, slots, values);
  return values.to_dense();
}

}  // namespace

StochasticMatrix interpolate_kernel(const AdiabaticSpec& spec, double s) {
  if (spec.mode() != Mode::discrete) throw ValidationError("interpolate_kernel: continuous spec");
  check_s(s);
  return StochasticMatrix(interpolated_dense(spec, s));
}

Generator interpolate_generator(const AdiabaticSpec& spec, double s) {
  if (spec.mode() != Mode::continuous) throw ValidationError("interpolate_generator: discrete spec");
  check_s(s);
  return Generator(interpolated_dense(spec, s));
}

HatDecomposition decompose_hat(const AdiabaticSpec& spec, double s) {
  check_s(s);
  const ScheduleFamily& family = spec.schedules();
  const double phi = evaluate_unchecked(family.min_schedule(), s);
  if (s >= 1.0 || phi >= 1.0) {
    throw DegenerateDecomposition("minimum schedule equals 1 at s = " + std::to_string(s));
  }
  const Eigen::MatrixXd& a = spec.initial_entries();
  const Eigen::MatrixXd& b = spec.final_entries();
  const Eigen::Index n = a.rows();
  std::vector<double> slot_values;
  family.evaluate_slots(s, slot_values);
  Eigen::MatrixXd hat = Eigen::MatrixXd::Zero(n, n);
  const bool continuous = spec.mode() == Mode::continuous;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (continuous && i == j) continue;
      if (a(i, j) == 0.0 && b(i, j) == 0.0) continue;
      const double phi_ij =
          slot_values[family.slot_of(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
      hat(i, j) = ((1.0 - phi_ij) * a(i, j) + (phi_ij - phi) * b(i, j)) / (1.0 - phi);
    }
  }
  if (continuous) {
    for (Eigen::Index i = 0; i < n; ++i) hat(i, i) = -(hat.row(i).sum() - hat(i, i));
    return HatDecomposition{Generator(std::move(hat)), phi};
  }
  return HatDecomposition{StochasticMatrix(std::move(hat)), phi};
}

}  // namespace adiabatic
