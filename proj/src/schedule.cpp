#include "adiabatic/schedule.hpp"

#include "adiabatic/errors.hpp"

#include <cmath>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

namespace adiabatic {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

struct Schedule::Impl {
  ScheduleKind kind = ScheduleKind::linear;
  int order = 1;
  double a = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  bool degenerate = false;
  std::vector<std::array<double, 2>> knots;
  std::shared_ptr<const Pchip> spline;
  std::function<double(double)> evaluator;
  std::string label;
  std::vector<Schedule> parts;

  double raw(double s) const {
    switch (kind) {
      case ScheduleKind::linear:
        return s;
      case ScheduleKind::poly_flat:
        return 1.0 - std::pow(1.0 - s, order);
      case ScheduleKind::glauber:
        return degenerate ? s : glauber_schedule_value(a, beta1, beta2, s);
      case ScheduleKind::sampled:
        return (*spline)(s);
      case ScheduleKind::custom:
        return evaluator(s);
      case ScheduleKind::minimum: {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& part : parts) best = std::min(best, evaluate_unchecked(part, s));
        return best;
      }
    }
    return s;
  }
};

namespace {

const std::vector<std::array<double, 2>> kNoKnots;
const std::vector<Schedule> kNoParts;

void validate_on_grid(const Schedule::Impl& impl, const std::string& name) {
  constexpr double kEndpointTolerance = 1e-12;
  const double at0 = impl.raw(0.0);
  const double at1 = impl.raw(1.0);
  if (!(std::abs(at0) <= kEndpointTolerance) || !(std::abs(at1 - 1.0) <= kEndpointTolerance)) {
    throw ValidationError(name + ": schedule must satisfy phi(0) = 0 and phi(1) = 1");
  }
  for (std::size_t k = 0; k < kScheduleGridPoints; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(kScheduleGridPoints - 1);
    const double v = impl.raw(s);
    if (!std::isfinite(v) || v < -kEndpointTolerance || v > 1.0 + kEndpointTolerance) {
      std::ostringstream msg;
      msg << name << ": value " << v << " at s = " << s << " is outside [0,1]";
      throw ValidationError(msg.str());
    }
  }
}

double factorial(int m) {
  double f = 1.0;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

double backward_difference(const std::function<double(double)>& f, int k, double h) {
  // sum_i (-1)^i C(k,i) f(1 - i h) / h^k
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= k; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * f(1.0 - i * h);
    binom = binom * (k - i) / (i + 1);
  }
  return sum / std::pow(h, k);
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::poly_flat: return "poly_flat";
    case ScheduleKind::glauber: return "glauber";
    case ScheduleKind::sampled: return "sampled";
    case ScheduleKind::custom: return "custom";
    case ScheduleKind::minimum: return "minimum";
  }
  return "unknown";
}

double glauber_schedule_value(double a, double beta1, double beta2, double s) {
  const double gap = a * beta1 - a * beta2;
  return std::cosh(-a * beta2) * std::sinh(s * gap) /
         (std::sinh(gap) * std::cosh(-a * beta1 + s * gap));
}

double glauber_schedule_slope_at_one(double a, double beta1, double beta2) {
  const double gap = a * beta1 - a * beta2;
  return gap * std::cosh(a * beta1) / (std::sinh(gap) * std::cosh(a * beta2));
}

Schedule::Schedule(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Schedule Schedule::linear() {
  static const auto shared = std::make_shared<const Impl>();
  return Schedule(shared);
}

Schedule Schedule::poly_flat(int m) {
  if (m < 1) throw ValidationError("poly_flat: order m must be >= 1");
  if (m == 1) return linear();
  auto impl = std::make_shared<Impl>();
  impl->kind = ScheduleKind::poly_flat;
  impl->order = m;
  return Schedule(std::move(impl));
}

Schedule Schedule::glauber(double a, double beta1, double beta2) {
  if (!std::isfinite(a) || a <= 0.0) throw ValidationError("glauber schedule: a must be > 0");
  if (!std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw ValidationError("glauber schedule: betas must be finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = ScheduleKind::glauber;
  impl->a = a;
  impl->beta1 = beta1;
  impl->beta2 = beta2;
  impl->degenerate = (beta1 == beta2);
  validate_on_grid(*impl, "glauber schedule");
  return Schedule(std::move(impl));
}

Schedule Schedule::sampled(std::vector<std::array<double, 2>> knots) {
  if (knots.size() < 4) throw ValidationError("sampled schedule: needs at least 4 knots");
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k][0] > knots[k - 1][0])) {
      throw ValidationError("sampled schedule: knot positions must be strictly increasing");
    }
  }
  if (knots.front()[0] != 0.0 || knots.back()[0] != 1.0) {
    throw ValidationError("sampled schedule: knots must span [0,1]");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [s, v] : knots) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ValidationError("sampled schedule: knot values must lie in [0,1]");
    }
    xs.push_back(s);
    ys.push_back(v);
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = ScheduleKind::sampled;
  impl->knots = std::move(knots);
  impl->spline = std::make_shared<const Pchip>(std::move(xs), std::move(ys));
  validate_on_grid(*impl, "sampled schedule");
  return Schedule(std::move(impl));
}

Schedule Schedule::custom(std::function<double(double)> evaluator, std::string label) {
  if (!evaluator) throw ValidationError("custom schedule: empty evaluator");
  auto impl = std::make_shared<Impl>();
  impl->kind = ScheduleKind::custom;
  impl->evaluator = std::move(evaluator);
  impl->label = std::move(label);
  validate_on_grid(*impl, "custom schedule '" + impl->label + "'");
  return Schedule(std::move(impl));
}

Schedule Schedule::pointwise_min(const std::vector<Schedule>& parts) {
  if (parts.empty()) throw ValidationError("pointwise_min: no schedules");
  std::vector<Schedule> flat;
  auto add = [&flat](const Schedule& s) {
    const bool seen = std::any_of(flat.begin(), flat.end(), [&](const Schedule& other) {
      return other.identity() == s.identity();
    });
    if (!seen) flat.push_back(s);
  };
  for (const auto& part : parts) {
    if (part.kind() == ScheduleKind::minimum) {
      for (const auto& inner : part.parts()) add(inner);
    } else {
      add(part);
    }
  }
  if (flat.size() == 1) return flat.front();
  auto impl = std::make_shared<Impl>();
  impl->kind = ScheduleKind::minimum;
  impl->parts = std::move(flat);
  return Schedule(std::move(impl));
}

double evaluate_unchecked(const Schedule& phi, double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return std::clamp(phi.impl_->raw(s), 0.0, 1.0);
}

double Schedule::operator()(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ValidationError("schedule evaluated outside [0,1] at s = " + std::to_string(s));
  }
  return evaluate_unchecked(*this, s);
}

double eval_schedule(const Schedule& phi, double s) { return phi(s); }

ScheduleKind Schedule::kind() const noexcept { return impl_->kind; }

bool Schedule::degenerate() const noexcept { return impl_->degenerate; }

int Schedule::poly_order() const {
  if (impl_->kind != ScheduleKind::linear && impl_->kind != ScheduleKind::poly_flat) {
    throw ValidationError("poly_order: not a polynomial schedule");
  }
  return impl_->order;
}

std::array<double, 3> Schedule::glauber_parameters() const {
  if (impl_->kind != ScheduleKind::glauber) throw ValidationError("not a glauber schedule");
  return {impl_->a, impl_->beta1, impl_->beta2};
}

const std::vector<std::array<double, 2>>& Schedule::knots() const {
  return impl_->kind == ScheduleKind::sampled ? impl_->knots : kNoKnots;
}

const std::vector<Schedule>& Schedule::parts() const {
  return impl_->kind == ScheduleKind::minimum ? impl_->parts : kNoParts;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case ScheduleKind::linear: os << "linear"; break;
    case ScheduleKind::poly_flat: os << "poly_flat(m=" << impl_->order << ")"; break;
    case ScheduleKind::glauber:
      os << "glauber(a=" << impl_->a << ", beta1=" << impl_->beta1 << ", beta2=" << impl_->beta2
         << (impl_->degenerate ? ", degenerate" : "") << ")";
      break;
    case ScheduleKind::sampled: os << "sampled(" << impl_->knots.size() << " knots)"; break;
    case ScheduleKind::custom: os << "custom(" << impl_->label << ")"; break;
    case ScheduleKind::minimum: {
      os << "min(";
      for (std::size_t k = 0; k < impl_->parts.size(); ++k) {
        os << (k ? ", " : "") << impl_->parts[k].describe();
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

std::optional<Flatness> Schedule::exact_flatness() const {
  switch (impl_->kind) {
    case ScheduleKind::linear:
      return Flatness{1, 1.0};
    case ScheduleKind::poly_flat: {
      // d^m/ds^m [1 - (1-s)^m] = -(-1)^m m!
      const double sign = (impl_->order % 2 == 0) ? -1.0 : 1.0;
      return Flatness{impl_->order, sign * factorial(impl_->order)};
    }
    case ScheduleKind::glauber:
      if (impl_->degenerate) return Flatness{1, 1.0};
      return Flatness{1, glauber_schedule_slope_at_one(impl_->a, impl_->beta1, impl_->beta2)};
    case ScheduleKind::minimum: {
      // Near s = 1, phi(1-h) ~ 1 - |phi^(m)(1)| h^m / m!; the smallest m wins,
      // ties go to the larger |leading|.
      std::optional<Flatness> best;
      for (const auto& part : impl_->parts) {
        auto f = part.exact_flatness();
        if (!f) return std::nullopt;
        if (!best || f->order < best->order ||
            (f->order == best->order && std::abs(f->leading) > std::abs(best->leading))) {
          best = f;
        }
      }
      return best;
    }
    case ScheduleKind::sampled:
    case ScheduleKind::custom:
      return std::nullopt;
  }
  return std::nullopt;
}

double Schedule::smooth_window() const {
  switch (impl_->kind) {
    case ScheduleKind::sampled:
      return 1.0 - impl_->knots[impl_->knots.size() - 2][0];
    case ScheduleKind::minimum: {
      double w = 1.0;
      for (const auto& part : impl_->parts) w = std::min(w, part.smooth_window());
      return w;
    }
    default:
      return 1.0;
  }
}

double derivative_at_one(const std::function<double(double)>& f, int k, double h_max) {
  if (k < 1) throw ValidationError("derivative_at_one: order must be >= 1");
  constexpr int kLevels = 12;
  constexpr int kMinLevels = 5;
  const double h0 = std::min(h_max, 0.1) / k;
  double table[kLevels][kLevels];
  double best = backward_difference(f, k, h0);
  double best_error = std::numeric_limits<double>::infinity();
  table[0][0] = best;
  for (int i = 1; i < kLevels; ++i) {
    const double h = h0 / std::ldexp(1.0, i);
    table[i][0] = backward_difference(f, k, h);
    double factor = 1.0;
    for (int j = 1; j <= i; ++j) {
      factor *= 2.0;
      table[i][j] = (factor * table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
      const double err = std::max(std::abs(table[i][j] - table[i][j - 1]),
                                  std::abs(table[i][j] - table[i - 1][j - 1]));
      if (err <= best_error) {
        best_error = err;
        best = table[i][j];
      }
    }
    // Higher levels only add roundoff once the diagonal starts diverging;
    // the first few levels are still eliminating truncation terms.
    if (i >= kMinLevels && std::abs(table[i][i] - table[i - 1][i - 1]) >= 2.0 * best_error) break;
  }
  return best;
}

Flatness flatness_order_numeric(const std::function<double(double)>& f, int max_m, double tol,
                                double h_max) {
  if (max_m < 1) throw ValidationError("flatness_order: max_m must be >= 1");
  for (int k = 1; k <= max_m; ++k) {
    const double d = derivative_at_one(f, k, h_max);
    if (std::abs(d) > tol) return Flatness{k, d};
  }
  throw FlatnessUndetected("no derivative of order <= " + std::to_string(max_m) +
                           " exceeds tolerance at s = 1");
}

Flatness flatness_order(const Schedule& phi, int max_m, double tol) {
  if (max_m < 1) throw ValidationError("flatness_order: max_m must be >= 1");
  if (auto exact = phi.exact_flatness()) {
    if (exact->order > max_m) {
      throw FlatnessUndetected("flatness order " + std::to_string(exact->order) +
                               " exceeds max_m = " + std::to_string(max_m));
    }
    return *exact;
  }
  auto f = [&phi](double s) { return evaluate_unchecked(phi, s); };
  return flatness_order_numeric(f, max_m, tol, phi.smooth_window());
}

ScheduleFamily::Builder::Builder(Schedule default_schedule, bool default_inert) {
  slots_.push_back({std::move(default_schedule), default_inert});
}

std::size_t ScheduleFamily::Builder::add_slot(Schedule schedule, bool inert) {
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (slots_[k].schedule.identity() == schedule.identity() && slots_[k].inert == inert) {
      return k;
    }
  }
  slots_.push_back({std::move(schedule), inert});
  return slots_.size() - 1;
}

ScheduleFamily::Builder& ScheduleFamily::Builder::assign(std::size_t i, std::size_t j,
                                                         std::size_t slot) {
  if (slot >= slots_.size()) throw ValidationError("ScheduleFamily: unknown slot");
  if (i > 0xffffffffULL || j > 0xffffffffULL) throw ValidationError("ScheduleFamily: index too large");
  entries_[ScheduleFamily::key(i, j)] = static_cast<std::uint32_t>(slot);
  return *this;
}

ScheduleFamily::Builder& ScheduleFamily::Builder::assign(std::size_t i, std::size_t j,
                                                         Schedule schedule, bool inert) {
  return assign(i, j, add_slot(std::move(schedule), inert));
}

ScheduleFamily ScheduleFamily::Builder::build() && {
  std::vector<Slot> slots;
  slots.reserve(slots_.size());
  for (auto& p : slots_) slots.push_back({std::move(p.schedule), p.inert});
  return ScheduleFamily(std::move(slots), std::move(entries_));
}

ScheduleFamily::ScheduleFamily(Schedule schedule)
    : slots_{{std::move(schedule), false}}, min_(Schedule::linear()) {
  compute_caches();
}

ScheduleFamily::ScheduleFamily(std::vector<Slot> slots,
                               std::unordered_map<std::uint64_t, std::uint32_t> entries)
    : slots_(std::move(slots)), entries_(std::move(entries)), min_(Schedule::linear()) {
  compute_caches();
}

void ScheduleFamily::compute_caches() {
  std::vector<bool> used(slots_.size(), false);
  used[kDefaultSlot] = true;
  for (const auto& [k, slot] : entries_) used[slot] = true;
  std::vector<Schedule> governing;
  std::vector<Schedule> all;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (!used[k]) continue;
    all.push_back(slots_[k].schedule);
    if (!slots_[k].inert) governing.push_back(slots_[k].schedule);
  }
  min_ = Schedule::pointwise_min(governing.empty() ? all : governing);
  try {
    flatness_ = flatness_order(min_);
  } catch (const FlatnessUndetected& e) {
    flatness_error_ = e.what();
  }
}

std::size_t ScheduleFamily::slot_of(std::size_t i, std::size_t j) const {
  const auto it = entries_.find(key(i, j));
  return it == entries_.end() ? kDefaultSlot : it->second;
}

const Schedule& ScheduleFamily::schedule_for(std::size_t i, std::size_t j) const {
  return slots_[slot_of(i, j)].schedule;
}

Flatness ScheduleFamily::flatness() const {
  if (!flatness_) throw FlatnessUndetected(flatness_error_);
  return *flatness_;
}

void ScheduleFamily::evaluate_slots(double s, std::vector<double>& out) const {
  out.resize(slots_.size());
  for (std::size_t k = 0; k < slots_.size(); ++k) out[k] = evaluate_unchecked(slots_[k].schedule, s);
}

Schedule min_schedule(const ScheduleFamily& family) { return family.min_schedule(); }

}  // namespace adiabatic
