#include "adiabatic/engine.hpp"

#include "adiabatic/errors.hpp"
#include "uniformization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace adiabatic {

namespace {

Eigen::MatrixXd point_mass_rows(std::size_t dim, const std::vector<std::size_t>& starts) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(starts.size()),
                                               static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < starts.size(); ++r) {
    rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(starts[r])) = 1.0;
  }
  return rows;
}

std::vector<std::size_t> all_states(std::size_t dim) {
  std::vector<std::size_t> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = i;
  return v;
}

double max_row_l1(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Distribution row_distribution(const Eigen::MatrixXd& rows, Eigen::Index r) {
  Eigen::VectorXd w = rows.row(r).transpose().cwiseMax(0.0);
  return Distribution(std::move(w), 1e-8);
}

void require_mode(const AdiabaticSpec& spec, Mode mode, const char* what) {
  if (spec.mode() != mode) {
    throw ValidationError(std::string(what) + ": spec is in " + to_string(spec.mode()) + " mode");
  }
}

long integral_horizon(double T) {
  if (!(T >= 1.0) || T != std::floor(T) || T > 9e15) {
    throw ValidationError("discrete horizon must be an integer >= 1");
  }
  return static_cast<long>(T);
}

// Classical RK4 on d mu/dt = mu Q(t/T) with step doubling. Rows of the state
// matrix are independent distributions.
class Rk4Integrator {
 public:
  Rk4Integrator(const AdiabaticSpec& spec, double horizon, double tol)
      : op_(spec.interpolated()), q_(op_.make_operator()), horizon_(horizon), tol_(tol) {
    const double rate = spec.uniform_rate();
    step_cap_ = horizon / 1000.0;
    if (rate > 0.0) step_cap_ = std::min(step_cap_, 0.1 / rate);
  }

  void integrate(Eigen::MatrixXd& y, double t0, double t1) {
    if (!(t1 > t0)) return;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon();
    double t = t0;
    double h = std::min(step_cap_, t1 - t0);
    rhs(t, y, k1_);
    while (t < t1) {
      bool last = false;
      if (t1 - t <= h * (1.0 + 1e-12)) {
        h = t1 - t;
        last = true;
      }
      rk4_step(y, k1_, t, h, full_);
      rk4_step(y, k1_, t, 0.5 * h, half_);
      rhs(t + 0.5 * h, half_, k1_mid_);
      rk4_step(half_, k1_mid_, t + 0.5 * h, 0.5 * h, two_);
      diff_ = two_ - full_;
      const double err = max_row_l1(diff_) / 15.0;
      const double allowance = std::max(tol_ * h / horizon_, floor);
      if (!std::isfinite(err)) throw IntegrationError("non-finite state during integration");
      if (err <= allowance) {
        y = two_ + diff_ / 15.0;
        t = last ? t1 : t + h;
        if (t < t1) rhs(t, y, k1_);
        const double grow = err > 0.0 ? 0.9 * std::pow(allowance / err, 0.2) : 2.0;
        h = std::min(step_cap_, h * std::clamp(grow, 0.2, 2.0));
      } else {
        h *= std::clamp(0.9 * std::pow(allowance / err, 0.2), 0.1, 0.5);
        if (h < 1e-13 * horizon_) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t;
          throw IntegrationError(msg.str());
        }
      }
    }
  }

 private:
  void rhs(double t, const Eigen::MatrixXd& y, Eigen::MatrixXd& out) {
    const double s = std::clamp(t / horizon_, 0.0, 1.0);
    op_.fill(s, slots_, q_);
    q_.apply(y, out);
  }

  void rk4_step(const Eigen::MatrixXd& y, const Eigen::MatrixXd& k1, double t, double h,
                Eigen::MatrixXd& out) {
    tmp_ = y + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    rhs(t + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    rhs(t + h, tmp_, k4_);
    out = y + (h / 6.0) * (k1 + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  const InterpolatedOperator& op_;
  RowOperator q_;
  std::vector<double> slots_;
  double horizon_;
  double tol_;
  double step_cap_;
  Eigen::MatrixXd k1_, k1_mid_, k2_, k3_, k4_, tmp_, full_, half_, two_, diff_;
};

void check_rows(const AdiabaticSpec& spec, const Eigen::MatrixXd& rows) {
  if (static_cast<std::size_t>(rows.cols()) != spec.dim()) {
    throw DimensionMismatch("row length does not match the spec's state space");
  }
}

}  // namespace

Eigen::MatrixXd evolve_discrete_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows, long T) {
  require_mode(spec, Mode::discrete, "evolve_discrete");
  check_rows(spec, rows);
  if (T < 1) throw ValidationError("evolve_discrete: T must be >= 1");
  const auto& op = spec.interpolated();
  RowOperator p = op.make_operator();
  std::vector<double> slots;
  Eigen::MatrixXd next(rows.rows(), rows.cols());
  for (long t = 1; t <= T; ++t) {
    const double s = t == T ? 1.0 : static_cast<double>(t) / static_cast<double>(T);
    op.fill(s, slots, p);
    p.apply(rows, next);
    rows.swap(next);
  }
  return rows;
}

Distribution evolve_discrete(const AdiabaticSpec& spec, const Distribution& nu, long T) {
  Eigen::MatrixXd rows = nu.weights().transpose();
  rows = evolve_discrete_rows(spec, std::move(rows), T);
  return Distribution(rows.row(0).transpose(), 1e-10);
}

Eigen::MatrixXd evolve_continuous_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows, double T,
                                       double tol) {
  require_mode(spec, Mode::continuous, "evolve_continuous");
  check_rows(spec, rows);
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("evolve_continuous: T must be > 0");
  if (!(tol > 0.0)) throw ValidationError("evolve_continuous: tol must be > 0");
  Rk4Integrator integrator(spec, T, tol);
  integrator.integrate(rows, 0.0, T);
  return rows;
}

Distribution evolve_continuous(const AdiabaticSpec& spec, const Distribution& nu, double T,
                               double tol) {
  Eigen::MatrixXd rows = nu.weights().transpose();
  rows = evolve_continuous_rows(spec, std::move(rows), T, tol);
  return row_distribution(rows, 0);
}

Eigen::MatrixXd evolve_continuous_frozen_rows(const AdiabaticSpec& spec, Eigen::MatrixXd rows,
                                              double T, std::size_t pieces, double tol) {
  require_mode(spec, Mode::continuous, "evolve_continuous_frozen");
  check_rows(spec, rows);
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("frozen evolution: T must be >= 0");
  if (pieces == 0) throw ValidationError("frozen evolution: pieces must be >= 1");
  const double rate = spec.uniform_rate();
  if (T == 0.0 || rate == 0.0) return rows;
  const auto& op = spec.interpolated();
  RowOperator q = op.make_operator();
  std::vector<double> slots;
  const double dt = T / static_cast<double>(pieces);
  const double piece_tol = tol / static_cast<double>(pieces);
  const auto& starts = q.row_starts();
  const auto& cols = q.cols();
  for (std::size_t k = 0; k < pieces; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(pieces);
    op.fill(s, slots, q);
    RowOperator p1 = q;
    auto& v = p1.values();
    for (std::size_t i = 0; i < p1.dim(); ++i) {
      for (std::size_t e = starts[i]; e < starts[i + 1]; ++e) {
        v[e] /= rate;
        if (cols[e] == i) v[e] = std::max(0.0, v[e] + 1.0);
      }
    }
    rows = detail::uniformize_rows(rows, p1, rate * dt, piece_tol);
  }
  return rows;
}

Distribution evolve_continuous_frozen(const AdiabaticSpec& spec, const Distribution& nu, double T,
                                      std::size_t pieces, double tol) {
  Eigen::MatrixXd rows = nu.weights().transpose();
  rows = evolve_continuous_frozen_rows(spec, std::move(rows), T, pieces, tol);
  return row_distribution(rows, 0);
}

EvolutionResult worst_case_evolution(const AdiabaticSpec& spec, double T, double tol) {
  const auto& starts = spec.start_states();
  Eigen::MatrixXd rows = point_mass_rows(spec.dim(), starts);
  if (spec.mode() == Mode::discrete) {
    rows = evolve_discrete_rows(spec, std::move(rows), integral_horizon(T));
  } else {
    rows = evolve_continuous_rows(spec, std::move(rows), T, tol);
  }
  const Eigen::VectorXd& pi = spec.final_stationary().weights();
  std::vector<double> tv(starts.size());
  std::size_t worst = 0;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    tv[r] = std::min(1.0, 0.5 * (rows.row(static_cast<Eigen::Index>(r)).transpose() - pi).lpNorm<1>());
    if (tv[r] > tv[worst]) worst = r;
  }
  return EvolutionResult{row_distribution(rows, static_cast<Eigen::Index>(worst)), T, tv[worst],
                         starts[worst], starts, std::move(tv)};
}

long mixing_time(const StochasticMatrix& p, double epsilon, const MixingOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("mixing_time: epsilon must be in (0,1)");
  const Distribution pi = stationary_distribution(p);
  const auto starts = options.starts.empty() ? all_states(p.dim()) : options.starts;
  Eigen::MatrixXd rows = point_mass_rows(p.dim(), starts);
  const RowOperator op = RowOperator::from_dense(p.entries());
  Eigen::MatrixXd next(rows.rows(), rows.cols());
  for (long t = 0; t <= options.cap; ++t) {
    if (max_row_tv(rows, pi.weights()) <= epsilon) return t;
    op.apply(rows, next);
    rows.swap(next);
  }
  throw MixingTimeoutError("mixing time exceeds the cap of " + std::to_string(options.cap) +
                           " steps");
}

double mixing_time(const Generator& q, double epsilon, const MixingOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("mixing_time: epsilon must be in (0,1)");
  const Distribution pi = stationary_distribution(q);
  const RateBound lambda = options.lambda.value_or(RateBound::for_generator(q));
  if (!lambda.certifies(q)) throw InvalidRateBound("mixing_time: lambda below maximal exit rate");
  const auto starts = options.starts.empty() ? all_states(q.dim()) : options.starts;
  Eigen::MatrixXd lo_rows = point_mass_rows(q.dim(), starts);
  if (max_row_tv(lo_rows, pi.weights()) <= epsilon) return 0.0;
  if (lambda.value() == 0.0) throw MixingTimeoutError("zero generator never mixes");
  const RowOperator p1 = detail::uniformized_kernel(q.entries(), lambda.value());
  auto advance = [&](const Eigen::MatrixXd& rows, double dt) {
    return detail::uniformize_rows(rows, p1, lambda.value() * dt, options.tol);
  };
  auto passes = [&](const Eigen::MatrixXd& rows) {
    return max_row_tv(rows, pi.weights()) <= epsilon;
  };

  // Bracket: lo fails, hi passes.
  double lo = 0.0;
  double hi = 0.0;
  const bool grid = options.time_grid.has_value();
  const double dt = grid ? *options.time_grid : 1.0 / lambda.value();
  if (!(dt > 0.0)) throw ValidationError("mixing_time: time grid must be > 0");
  double step = dt;
  for (long probes = 0;; ++probes) {
    if (probes >= options.cap || lo + step > options.max_time) {
      throw MixingTimeoutError("continuous mixing time not reached before the cap");
    }
    Eigen::MatrixXd rows = advance(lo_rows, step);
    if (passes(rows)) {
      hi = lo + step;
      break;
    }
    lo += step;
    lo_rows = std::move(rows);
    if (!grid) step = lo;
  }
  while (hi - lo > options.rel_precision * hi) {
    const double mid = 0.5 * (lo + hi);
    Eigen::MatrixXd rows = advance(lo_rows, mid - lo);
    if (passes(rows)) {
      hi = mid;
    } else {
      lo = mid;
      lo_rows = std::move(rows);
    }
  }
  return hi;
}

SearchReport adiabatic_time(const AdiabaticSpec& spec, double epsilon, const SearchOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("adiabatic_time: epsilon must be in (0,1)");
  const bool discrete = spec.mode() == Mode::discrete;
  SearchReport report{};
  report.epsilon = epsilon;

  auto probe = [&](double T) {
    if (report.evaluations >= options.max_evaluations) {
      throw SearchTimeoutError("adiabatic time search exceeded " +
                               std::to_string(options.max_evaluations) + " evaluations");
    }
    for (const auto& p : report.probes) {
      if (p.horizon == T) return p.worst_case_tv;
    }
    ++report.evaluations;
    const double tv = worst_case_evolution(spec, T, options.tol).worst_case_tv;
    report.probes.push_back({T, tv});
    return tv;
  };

  double start = 0.0;
  if (options.initial_horizon) {
    start = *options.initial_horizon;
  } else if (discrete) {
    MixingOptions mix;
    mix.starts = spec.start_states();
    start = static_cast<double>(mixing_time(spec.final_kernel(), epsilon, mix));
  } else {
    MixingOptions mix;
    mix.lambda = spec.rate_bound();
    mix.starts = spec.start_states();
    start = mixing_time(spec.final_generator(), epsilon, mix);
  }
  if (discrete) {
    start = std::max(1.0, std::ceil(start));
  } else if (!(start > 0.0)) {
    start = spec.uniform_rate() > 0.0 ? 1.0 / spec.uniform_rate() : 1.0;
  }

  double lo = 0.0;
  double hi = start;
  if (probe(start) > epsilon) {
    lo = start;
    hi = 2.0 * start;
    while (probe(hi) > epsilon) {
      lo = hi;
      hi *= 2.0;
      if (hi > options.max_horizon) {
        throw SearchTimeoutError("adiabatic time exceeds the horizon cap");
      }
    }
  }
  if (discrete) {
    while (hi - lo > 1.0) {
      const double mid = std::floor(0.5 * (lo + hi));
      (probe(mid) <= epsilon ? hi : lo) = mid;
    }
  } else {
    while (hi - lo > options.rel_precision * hi) {
      const double mid = 0.5 * (lo + hi);
      (probe(mid) <= epsilon ? hi : lo) = mid;
    }
  }
  report.measured_time = hi;
  report.bracket = {lo, hi};
  report.worst_case_tv = probe(hi);
  if (options.verify) probe(2.0 * hi);

  double smallest_pass = std::numeric_limits<double>::infinity();
  for (const auto& p : report.probes) {
    if (p.worst_case_tv <= epsilon) smallest_pass = std::min(smallest_pass, p.horizon);
  }
  report.monotonicity_flag = false;
  for (const auto& p : report.probes) {
    if (p.worst_case_tv > epsilon && p.horizon > smallest_pass) report.monotonicity_flag = true;
  }
  return report;
}

DeviationProfile trajectory_deviation(const AdiabaticSpec& spec, double T, std::size_t grid_points,
                                      double tol) {
  if (grid_points < 2) throw ValidationError("trajectory_deviation: need at least 2 grid points");
  const bool discrete = spec.mode() == Mode::discrete;
  auto frozen_stationary = [&](double s) {
    try {
      if (discrete) return stationary_distribution(interpolate_kernel(spec, s));
      return stationary_distribution(interpolate_generator(spec, s));
    } catch (const NonUniqueStationary& e) {
      std::ostringstream msg;
      msg << "frozen kernel at s = " << s << ": " << e.what();
      throw NonUniqueStationary(msg.str(), s);
    }
  };

  std::vector<double> times;
  if (discrete) {
    const long horizon = integral_horizon(T);
    for (std::size_t k = 0; k < grid_points; ++k) {
      const double t = std::round(static_cast<double>(k) * static_cast<double>(horizon) /
                                  static_cast<double>(grid_points - 1));
      if (times.empty() || t > times.back()) times.push_back(t);
    }
  } else {
    if (!(T > 0.0)) throw ValidationError("trajectory_deviation: T must be > 0");
    for (std::size_t k = 0; k < grid_points; ++k) {
      times.push_back(T * static_cast<double>(k) / static_cast<double>(grid_points - 1));
    }
  }

  Eigen::MatrixXd mu = frozen_stationary(0.0).weights().transpose();
  DeviationProfile profile{0.0, {}, {}};
  const auto& op = spec.interpolated();
  RowOperator p = op.make_operator();
  std::vector<double> slots;
  Eigen::MatrixXd next(mu.rows(), mu.cols());
  std::optional<Rk4Integrator> integrator;
  if (!discrete) integrator.emplace(spec, T, tol);
  double previous = 0.0;
  for (double t : times) {
    if (discrete) {
      for (long step = static_cast<long>(previous) + 1; step <= static_cast<long>(t); ++step) {
        op.fill(static_cast<double>(step) / T, slots, p);
        p.apply(mu, next);
        mu.swap(next);
      }
    } else {
      integrator->integrate(mu, previous, t);
    }
    previous = t;
    const double s = std::min(1.0, t / T);
    const Distribution pi_t = frozen_stationary(s);
    const double dev = std::min(1.0, 0.5 * (mu.row(0).transpose() - pi_t.weights()).lpNorm<1>());
    profile.times.push_back(t);
    profile.deviation.push_back(dev);
    profile.sup_deviation = std::max(profile.sup_deviation, dev);
  }
  return profile;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SamplePath sample_path(const AdiabaticSpec& spec, double T, std::uint64_t seed, std::size_t start) {
  require_mode(spec, Mode::continuous, "sample_path");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("sample_path: T must be >= 0");
  if (start >= spec.dim()) throw ValidationError("sample_path: start state out of range");
  SamplePath path{start, {}};
  const double rate = spec.uniform_rate();
  if (rate <= 0.0 || T == 0.0) return path;
  std::mt19937_64 rng(splitmix64(seed));
  std::exponential_distribution<double> gap(rate);
  std::uniform_real_distribution<double> mark(0.0, rate);
  const auto& op = spec.interpolated();
  std::vector<double> slots;
  double t = 0.0;
  for (;;) {
    t += gap(rng);
    if (t > T) break;
    op.family().evaluate_slots(t / T, slots);
    const std::size_t next = op.pick(path.final_state, slots, mark(rng));
    if (next < spec.dim() && (path.event_times.empty() || t > path.event_times.back())) {
      path.final_state = next;
      path.event_times.push_back(t);
    }
  }
  return path;
}

std::vector<std::uint64_t> sample_final_counts(const AdiabaticSpec& spec, double T,
                                               std::size_t paths, std::uint64_t seed,
                                               std::size_t start, unsigned threads) {
  require_mode(spec, Mode::continuous, "sample_final_counts");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("sample_final_counts: T must be >= 0");
  if (start >= spec.dim()) throw ValidationError("sample_final_counts: start state out of range");
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, paths));
  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(spec.dim(), 0));
  // Mixing the base first keeps nearby user seeds from sharing path streams.
  const std::uint64_t base = splitmix64(seed);
  auto work = [&](std::size_t w) {
    for (std::size_t k = w; k < paths; k += workers) {
      ++partial[w][sample_path(spec, T, base ^ static_cast<std::uint64_t>(k), start).final_state];
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  std::vector<std::uint64_t> counts(spec.dim(), 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += part[i];
  }
  return counts;
}

}  // namespace adiabatic
