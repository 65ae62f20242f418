#include "adiabatic/bounds.hpp"
#include "adiabatic/cli.hpp"
#include "adiabatic/engine.hpp"
#include "adiabatic/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace adiabatic;

namespace {

BigInt brute_sum(long n, int k) {
  BigInt total = 0;
  for (long j = 1; j < n; ++j) total += boost::multiprecision::pow(BigInt(j), static_cast<unsigned>(k));
  return total;
}

}  // namespace

TEST(Bernoulli, Convention) {
  const auto b = bernoulli_table(12);
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[1], BigRational(-1, 2));
  EXPECT_EQ(b[2], BigRational(1, 6));
  EXPECT_EQ(b[4], BigRational(-1, 30));
  EXPECT_EQ(b[12], BigRational(-691, 2730));
  for (int k = 3; k <= 11; k += 2) EXPECT_EQ(b[static_cast<std::size_t>(k)], 0);
}

TEST(Faulhaber, ExamplesAndBruteForce) {
  EXPECT_EQ(faulhaber_sum(5, 2), 30);
  for (int k = 0; k <= 20; ++k) EXPECT_EQ(faulhaber_sum(1, k), 0);
  EXPECT_EQ(faulhaber_sum(100, 10), brute_sum(100, 10));
  for (long n = 1; n <= 200; ++n) {
    for (int k = 0; k <= 10; ++k) ASSERT_EQ(faulhaber_sum(n, k), brute_sum(n, k)) << n << " " << k;
  }
  EXPECT_EQ(faulhaber_sum(1000, 20), brute_sum(1000, 20));
  EXPECT_THROW(faulhaber_sum(0, 2), ValidationError);
  EXPECT_THROW(faulhaber_sum(5, 21), ValidationError);
}

TEST(AdiabaticBounds, Examples) {
  const auto d1 = discrete_adiabatic_bound(10, 0.1, 1);
  EXPECT_NEAR(d1.value, 1000.0, 1e-9);
  EXPECT_EQ(d1.kind, BoundKind::upper_order);
  EXPECT_NE(d1.notes.find("calibrated"), std::string::npos);
  EXPECT_NEAR(discrete_adiabatic_bound(100, 0.01, 2).value, 10000.0, 1e-8);

  EXPECT_NEAR(continuous_adiabatic_bound(20, 0.1, 1, 9).value, 36000.0, 1e-8);
  EXPECT_NEAR(continuous_adiabatic_bound(7, 0.2, 1, 1).value, 49 / 0.2, 1e-10);

  const auto k = kovchegov_continuous_explicit(10, 0.1, 1);
  EXPECT_EQ(k.value, 1010.025);
  EXPECT_EQ(k.kind, BoundKind::explicit_upper);
  EXPECT_NEAR(kovchegov_continuous_explicit(1, 1 - 1e-12, 1).value, 2.25, 1e-11);

  EXPECT_NE(discrete_adiabatic_bound(10, 0.5, 1).notes.find("0.3"), std::string::npos);
  EXPECT_EQ(discrete_adiabatic_bound(10, 0.2, 1).notes.find("0.3"), std::string::npos);
  EXPECT_THROW(discrete_adiabatic_bound(10, 1.0, 1), ValidationError);
  EXPECT_THROW(continuous_adiabatic_bound(10, 0.1, 0, 1), ValidationError);
}

TEST(AdiabaticBounds, ContinuousScaleIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  std::uniform_real_distribution<double> e(0.001, 0.999);
  for (int trial = 0; trial < 1000; ++trial) {
    const double t = u(rng);
    const double lam = u(rng);
    const double eps = e(rng);
    const int m = 1 + static_cast<int>(rng() % 5);
    const double M = std::pow(2.0, static_cast<int>(rng() % 9) - 4);
    const double base = continuous_adiabatic_bound(t, eps, m, lam).value;
    const double scaled = continuous_adiabatic_bound(M * t, eps, m, lam / M).value;
    EXPECT_NEAR(scaled, M * base, 1e-12 * M * base);
  }
}

TEST(ShiftLowerBound, Examples) {
  EXPECT_NEAR(shift_example_lower_bound(2, 4, true), 0.25, 1e-15);
  EXPECT_NEAR(shift_example_lower_bound(10, 100, false), 1 - std::exp(-0.25), 1e-15);
  EXPECT_NEAR(shift_example_lower_bound(10, 100, false), 0.221199, 1e-6);
  EXPECT_THROW(shift_example_lower_bound(10, 9, true), ValidationError);
  // Large T stays finite and accurate: 1 - prod (1 - k/T) ~ n(n-1)/(2T).
  const double tiny = shift_example_lower_bound(3, 1'000'000'000, true);
  EXPECT_NEAR(tiny, 3e-9, 1e-15);
}

TEST(ShiftLowerBound, GridProperties) {
  for (long n = 2; n <= 40; ++n) {
    double prev_exact = 2.0;
    double prev_relaxed = 2.0;
    for (long T = n; T <= 10 * n * n; ++T) {
      const double ex = shift_example_lower_bound(n, T, true);
      const double rel = shift_example_lower_bound(n, T, false);
      ASSERT_GE(ex, rel - 1e-12) << n << " " << T;
      ASSERT_GE(ex, 0.0);
      ASSERT_LT(ex, 1.0);
      ASSERT_GE(rel, 0.0);
      ASSERT_LT(rel, 1.0);
      ASSERT_LE(ex, prev_exact);
      ASSERT_LE(rel, prev_relaxed);
      prev_exact = ex;
      prev_relaxed = rel;
    }
  }
}

TEST(ShiftLowerBound, HorizonInversion) {
  for (long n : {10, 40}) {
    for (double eps : {0.05, 0.2}) {
      const double T = shift_example_horizon(n, eps);
      EXPECT_NEAR(1 - std::exp(-n * n / (4 * T)), eps, 1e-12);
    }
  }
}

TEST(GeneralScheduleBound, Examples) {
  for (long n : {2, 7, 15}) {
    for (long T : {n, 3 * n, n * n}) {
      EXPECT_NEAR(general_schedule_lower_bound(n, T, Schedule::linear()), shift_example_lower_bound(n, T, true),
                  1e-14);
    }
  }
  // phi = 1 on [0.5, 1]
  const auto saturating = Schedule::custom([](double s) { return std::min(1.0, 2 * s); }, "saturating");
  EXPECT_EQ(general_schedule_lower_bound(10, 100, saturating), 0.0);
  EXPECT_EQ(general_schedule_lower_bound(3, 3, Schedule::custom([](double s) { return s < 0.7 ? 0.0 : (s - 0.7) / 0.3; })),
            1.0);
}

TEST(GeneralScheduleBound, FlatScheduleScaling) {
  // With phi = 1-(1-s)^2 the bound behaves like 1 - exp(-c n^3 / T^2); inverting
  // for fixed eps gives T ~ n^{3/2}.
  const auto phi = Schedule::poly_flat(2);
  auto horizon = [&](long n, double eps) {
    long lo = n;
    long hi = n;
    while (general_schedule_lower_bound(n, hi, phi) > eps) hi *= 2;
    while (hi - lo > 1) {
      const long mid = (lo + hi) / 2;
      (general_schedule_lower_bound(n, mid, phi) > eps ? lo : hi) = mid;
    }
    return static_cast<double>(hi);
  };
  std::vector<std::array<double, 2>> samples;
  for (long n : {100, 200, 400, 800}) samples.push_back({static_cast<double>(n), horizon(n, 0.1)});
  EXPECT_NEAR(fit_scaling_exponent(samples).exponent, 1.5, 0.05);
  // and T ~ eps^{-1/2} at fixed n
  std::vector<std::array<double, 2>> by_eps;
  for (double eps : {0.02, 0.01, 0.005, 0.0025}) by_eps.push_back({eps, horizon(1000, eps)});
  EXPECT_NEAR(fit_scaling_exponent(by_eps).exponent, -0.5, 0.05);
  const double v = general_schedule_lower_bound(10, 1000, phi);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, shift_example_lower_bound(10, 1000, true));
}

TEST(TorusConstant, Examples) {
  for (double b1 : {0.1, 0.7, 2.0}) {
    EXPECT_NEAR(torus_constant_C(b1, 0.0), 2 * b1 / std::tanh(2 * b1), 1e-14);
  }
  using Big = boost::multiprecision::cpp_dec_float_50;
  const Big x = Big(2) * Big("0.5") - Big(2) * Big("0.2");
  const Big t = tanh(Big(2) * Big("0.2"));
  const Big want = x * (cosh(x) / sinh(x) - tanh(-Big(2) * Big("0.2"))) / ((1 - t) * (1 - t));
  EXPECT_NEAR(torus_constant_C(0.5, 0.2), want.convert_to<double>(), 1e-14);
  EXPECT_GT(torus_constant_C(0.5, 0.2), 0.0);
}

TEST(TorusConstant, ContinuousAcrossEqualBetas) {
  for (double b2 : {0.05, 0.2, 0.4, 0.9}) {
    const double t = std::tanh(2 * b2);
    const double limit = 1.0 / ((1 - t) * (1 - t));
    EXPECT_NEAR(torus_constant_C(b2, b2), limit, 1e-12);
    for (double gap : {1e-6, -1e-6, 1e-5, 5e-5, 2e-4}) {
      EXPECT_NEAR(torus_constant_C(b2 + gap, b2), limit, 1e-6 + 10 * std::abs(gap) * limit);
    }
    EXPECT_NEAR(torus_constant_C(b2 + 1e-6, b2), limit, 1e-6 * limit * 10);
  }
}

TEST(TorusBound, Examples) {
  const auto plain = torus_adiabatic_bound(5, 2, 0.1, 0.2, 0.4, false);
  const double lt = std::log(5.0) + std::log(20.0);
  EXPECT_NEAR(plain.value, torus_constant_C(0.2, 0.4) * 25 / 0.1 * lt * lt, 1e-9 * plain.value);
  for (int d : {1, 2, 3}) {
    const auto a = torus_adiabatic_bound(4, d, 0.05, 0.3, 0.1, false);
    const auto b = torus_adiabatic_bound(4, d, 0.05, 0.3, 0.1, true);
    EXPECT_NEAR(b.value / a.value, std::pow(4.0, d), 1e-12 * std::pow(4.0, d));
  }
  EXPECT_THROW(torus_adiabatic_bound(2, 2, 0.1, 0.2, 0.4, false), ValidationError);
}

TEST(ScalingFit, Examples) {
  std::vector<std::array<double, 2>> sq;
  for (double x : {1.0, 2.0, 5.0, 10.0}) sq.push_back({x, x * x});
  const auto f = fit_scaling_exponent(sq);
  EXPECT_NEAR(f.exponent, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);

  std::vector<std::array<double, 2>> five;
  for (double x : {0.5, 3.0, 7.0}) five.push_back({x, 5 * std::pow(x, 1.5)});
  const auto g = fit_scaling_exponent(five);
  EXPECT_NEAR(g.exponent, 1.5, 1e-12);
  EXPECT_NEAR(g.log_prefactor, std::log(5.0), 1e-12);

  EXPECT_THROW(fit_scaling_exponent({{1, 1}, {2, 2}}), ValidationError);
  EXPECT_THROW(fit_scaling_exponent({{1, 1}, {2, 2}, {3, -1}}), ValidationError);

  std::vector<std::array<double, 2>> noisy = {{1, 1}, {2, 8}, {3, 2}, {4, 30}};
  const auto h = fit_scaling_exponent(noisy);
  EXPECT_GE(h.r_squared, 0.0);
  EXPECT_LE(h.r_squared, 1.0);
}

TEST(Calibration, DiscreteBoundDominatesShiftMeasurements) {
  // t_mix of the final shift kernel is n for every eps; prefactor 1 already
  // dominates the measured adiabatic times.
  for (long n : {10, 20, 40}) {
    const auto spec = cli::builtin_example("shift-discrete(" + std::to_string(n) + ")");
    for (double eps : {0.05, 0.1}) {
      const double measured = adiabatic_time(spec, eps).measured_time;
      const double bound = discrete_adiabatic_bound(static_cast<double>(n), eps, 1, 1.0).value;
      EXPECT_LE(measured, bound) << n << " " << eps;
      EXPECT_GE(measured, shift_example_horizon(n, eps) * 0.999);
    }
  }
}

TEST(Calibration, KovchegovDominatesContinuousShift) {
  const auto spec = cli::builtin_example("shift-continuous(6)");
  const double eps = 0.1;
  const double tmix = mixing_time(spec.final_generator(), eps / 2);
  const double measured = adiabatic_time(spec, eps).measured_time;
  EXPECT_LE(measured, kovchegov_continuous_explicit(tmix, eps, spec.rate_bound().value()).value);
}
