#pragma once

// Interpolation schedules phi: [0,1] -> [0,1] with phi(0) = 0, phi(1) = 1,
// and per-entry schedule families.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace adiabatic {

enum class ScheduleKind { linear, poly_flat, glauber, sampled, custom, minimum };

std::string to_string(ScheduleKind kind);

/// Flatness at s = 1: smallest m with phi^(m)(1) != 0, and that derivative.
struct Flatness {
  int order = 1;
  double leading = 1.0;
};

/// Closed-form adiabatic Glauber schedule for a neighbourhood class with
/// coupling coefficient `a` (|neighbour spin sum|):
///   cosh(-a b2) sinh(s(a b1 - a b2)) / (sinh(a b1 - a b2) cosh(-a b1 + s(a b1 - a b2)))
/// No range checks; evaluable for any real s.
double glauber_schedule_value(double a, double beta1, double beta2, double s);

/// d/ds of glauber_schedule_value at s = 1 (never zero for beta1 != beta2).
double glauber_schedule_slope_at_one(double a, double beta1, double beta2);

class Schedule {
 public:
  /// phi(s) = s
  static Schedule linear();
  /// phi(s) = 1 - (1 - s)^m, flatness order m.
  static Schedule poly_flat(int m);
  /// Closed-form Glauber schedule; beta1 == beta2 yields phi(s) = s with the
  /// degeneracy flag set.
  static Schedule glauber(double a, double beta1, double beta2);
  /// Monotone cubic (PCHIP) through knots (s, phi(s)); needs >= 4 knots
  /// spanning [0,1] with phi(0) = 0 and phi(1) = 1.
  static Schedule sampled(std::vector<std::array<double, 2>> knots);
  static Schedule custom(std::function<double(double)> evaluator,
                         std::string label = "custom");
  /// Pointwise minimum; a single distinct part is returned unchanged.
  static Schedule pointwise_min(const std::vector<Schedule>& parts);

  /// Checked evaluation: throws ValidationError for s outside [0,1]. Endpoint
  /// values are exact.
  double operator()(double s) const;

  ScheduleKind kind() const noexcept;
  bool degenerate() const noexcept;
  std::string describe() const;

  /// poly_flat order (1 for linear).
  int poly_order() const;
  /// (a, beta1, beta2) of a glauber schedule.
  std::array<double, 3> glauber_parameters() const;
  const std::vector<std::array<double, 2>>& knots() const;
  const std::vector<Schedule>& parts() const;

  /// Flatness known in closed form (linear, poly_flat, glauber, minimum of
  /// those); nullopt otherwise.
  std::optional<Flatness> exact_flatness() const;
  /// Largest backward step usable for finite differences at s = 1 without
  /// crossing a kink (sampled schedules stay inside their last segment).
  double smooth_window() const;

  /// Identity of the underlying immutable evaluator, for de-duplication.
  const void* identity() const noexcept { return impl_.get(); }

  struct Impl;

 private:
  explicit Schedule(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;

  friend double evaluate_unchecked(const Schedule&, double) noexcept;
};

/// Evaluation for s already known to be in [0,1]; used on hot paths.
double evaluate_unchecked(const Schedule& phi, double s) noexcept;

double eval_schedule(const Schedule& phi, double s);

/// Backward-difference estimate of f^(k)(1) refined by Richardson
/// extrapolation (step ratio 2), starting at step min(h_max, 0.1) / k.
double derivative_at_one(const std::function<double(double)>& f, int k,
                         double h_max = 0.1);

/// Smallest m <= max_m with |f^(m)(1)| > tol, estimated numerically.
Flatness flatness_order_numeric(const std::function<double(double)>& f, int max_m,
                                double tol, double h_max = 0.1);

/// Exact for tagged kinds, numerical otherwise. Throws FlatnessUndetected.
Flatness flatness_order(const Schedule& phi, int max_m = 8, double tol = 1e-6);

class ScheduleFamily {
 public:
  class Builder {
   public:
    explicit Builder(Schedule default_schedule = Schedule::linear(),
                     bool default_inert = false);

    /// Registers a schedule slot. Inert slots may only be assigned to entries
    /// where the initial and final kernels agree; they do not take part in
    /// the pointwise minimum.
    std::size_t add_slot(Schedule schedule, bool inert = false);
    Builder& assign(std::size_t i, std::size_t j, std::size_t slot);
    Builder& assign(std::size_t i, std::size_t j, Schedule schedule, bool inert = false);

    ScheduleFamily build() &&;

   private:
    struct PendingSlot {
      Schedule schedule;
      bool inert;
    };
    std::vector<PendingSlot> slots_;
    std::unordered_map<std::uint64_t, std::uint32_t> entries_;
  };

  /// Every entry uses `schedule`.
  explicit ScheduleFamily(Schedule schedule = Schedule::linear());

  std::size_t slot_of(std::size_t i, std::size_t j) const;
  const Schedule& schedule_for(std::size_t i, std::size_t j) const;

  std::size_t slot_count() const noexcept { return slots_.size(); }
  const Schedule& slot(std::size_t k) const { return slots_.at(k).schedule; }
  bool slot_inert(std::size_t k) const { return slots_.at(k).inert; }
  static constexpr std::size_t kDefaultSlot = 0;

  const std::unordered_map<std::uint64_t, std::uint32_t>& overrides() const noexcept {
    return entries_;
  }
  static std::uint64_t key(std::size_t i, std::size_t j) noexcept {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  }

  /// Pointwise minimum over the governing (non-inert) slots; over all slots
  /// when every slot is inert.
  const Schedule& min_schedule() const noexcept { return min_; }
  /// Flatness of min_schedule(), computed at construction.
  Flatness flatness() const;
  bool has_flatness() const noexcept { return flatness_.has_value(); }

  /// Evaluates every slot at s into `out` (out[k] = slot k at s).
  void evaluate_slots(double s, std::vector<double>& out) const;

 private:
  struct Slot {
    Schedule schedule;
    bool inert;
  };
  ScheduleFamily(std::vector<Slot> slots,
                 std::unordered_map<std::uint64_t, std::uint32_t> entries);
  void compute_caches();

  std::vector<Slot> slots_;
  std::unordered_map<std::uint64_t, std::uint32_t> entries_;
  Schedule min_;
  std::optional<Flatness> flatness_;
  std::string flatness_error_;
};

Schedule min_schedule(const ScheduleFamily& family);

/// Grid used for schedule invariant checks: 1001 points on [0,1].
inline constexpr std::size_t kScheduleGridPoints = 1001;

}  // namespace adiabatic
