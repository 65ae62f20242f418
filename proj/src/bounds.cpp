#include "adiabatic/bounds.hpp"

#include "adiabatic/errors.hpp"

#include <cmath>
#include <cstdio>

namespace adiabatic {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must be in (0,1)");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be > 0");
}

std::string epsilon_note(double epsilon) {
  if (epsilon > 0.3) {
    return "epsilon > 0.3: the approximation epsilon ~ -log(1-epsilon) is not valid here";
  }
  return "";
}

std::string join_notes(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + "; " + b;
}

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::upper_order: return "upper-order";
    case BoundKind::explicit_upper: return "explicit-upper";
    case BoundKind::lower: return "lower";
  }
  return "unknown";
}

std::string BoundReport::parameter_string() const {
  std::string out;
  char buf[64];
  for (const auto& [key, value] : parameters) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    if (!out.empty()) out += ';';
    out += key + "=" + buf;
  }
  return out;
}

std::vector<BigRational> bernoulli_table(int k) {
  if (k < 0) throw ValidationError("bernoulli_table: k must be >= 0");
  std::vector<BigRational> b(static_cast<std::size_t>(k) + 1);
  b[0] = 1;
  for (int m = 1; m <= k; ++m) {
    BigRational acc = 0;
    for (int j = 0; j < m; ++j) acc += BigRational(binomial(m + 1, j)) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(m)] = -acc / (m + 1);
  }
  return b;
}

BigInt faulhaber_sum(long n, int k) {
  if (n < 1) throw ValidationError("faulhaber_sum: n must be >= 1");
  if (k < 0 || k > 20) throw ValidationError("faulhaber_sum: k must be in [0, 20]");
  const auto b = bernoulli_table(k);
  BigRational total = 0;
  for (int j = 0; j <= k; ++j) {
    BigInt power = boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(k + 1 - j));
    total += b[static_cast<std::size_t>(j)] * BigRational(binomial(k, j)) * BigRational(power) /
             (k + 1 - j);
  }
  // The closed form sums j = 0..n-1; drop the 0^0 term when k = 0.
  if (k == 0) total -= 1;
  if (boost::multiprecision::denominator(total) != 1) {
    throw Error("faulhaber_sum: closed form did not produce an integer");
  }
  return boost::multiprecision::numerator(total);
}

BoundReport discrete_adiabatic_bound(double t_mix, double epsilon, int m, double prefactor) {
  require_positive(t_mix, "t_mix");
  require_epsilon(epsilon);
  if (m < 1) throw ValidationError("m must be >= 1");
  require_positive(prefactor, "prefactor");
  const double md = m;
  const double value = prefactor * std::pow(t_mix, (md + 1.0) / md) / std::pow(epsilon, 1.0 / md);
  return BoundReport{"discrete_adiabatic",
                     value,
                     BoundKind::upper_order,
                     {{"t_mix", t_mix}, {"epsilon", epsilon}, {"m", md}, {"prefactor", prefactor}},
                     join_notes("order bound; prefactor is calibrated, not a proven constant",
                                epsilon_note(epsilon))};
}

BoundReport continuous_adiabatic_bound(double t_mix, double epsilon, int m, double lambda,
                                       double prefactor) {
  require_positive(t_mix, "t_mix");
  require_epsilon(epsilon);
  if (m < 1) throw ValidationError("m must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(prefactor, "prefactor");
  const double md = m;
  const double value =
      prefactor * std::pow(lambda / epsilon, 1.0 / md) * std::pow(t_mix, (md + 1.0) / md);
  return BoundReport{"continuous_adiabatic",
                     value,
                     BoundKind::upper_order,
                     {{"t_mix", t_mix},
                      {"epsilon", epsilon},
                      {"m", md},
                      {"lambda", lambda},
                      {"prefactor", prefactor}},
                     join_notes("order bound; prefactor is calibrated, not a proven constant",
                                epsilon_note(epsilon))};
}

BoundReport kovchegov_continuous_explicit(double t_mix, double epsilon, double lambda) {
  require_positive(t_mix, "t_mix");
  require_epsilon(epsilon);
  require_positive(lambda, "lambda");
  const double value = lambda * t_mix * t_mix / epsilon + t_mix + epsilon / (4.0 * lambda);
  return BoundReport{"kovchegov_continuous_explicit",
                     value,
                     BoundKind::explicit_upper,
                     {{"t_mix", t_mix}, {"epsilon", epsilon}, {"lambda", lambda}},
                     "t_mix is the mixing time at epsilon/2"};
}

double shift_example_lower_bound(long n, long T, bool exact) {
  if (n < 2) throw ValidationError("shift lower bound: n must be >= 2");
  if (T < n) throw ValidationError("shift lower bound: T must be >= n");
  const double Td = static_cast<double>(T);
  if (!exact) return -std::expm1(-static_cast<double>(n) * static_cast<double>(n) / (4.0 * Td));
  CompensatedSum log_product;
  for (long j = T - n + 1; j <= T - 1; ++j) {
    log_product.add(std::log1p(-static_cast<double>(T - j) / Td));
  }
  return -std::expm1(log_product.value());
}

double general_schedule_lower_bound(long n, long T, const Schedule& phi) {
  if (n < 2) throw ValidationError("schedule lower bound: n must be >= 2");
  if (T < n) throw ValidationError("schedule lower bound: T must be >= n");
  CompensatedSum log_product;
  for (long j = T - n + 1; j <= T; ++j) {
    const double v = phi(static_cast<double>(j) / static_cast<double>(T));
    if (v <= 0.0) return 1.0;
    log_product.add(std::log(v));
  }
  return -std::expm1(log_product.value());
}

double shift_example_horizon(long n, double epsilon) {
  require_epsilon(epsilon);
  const double nd = static_cast<double>(n);
  return -nd * nd / (4.0 * std::log1p(-epsilon));
}

double torus_constant_C(double beta1, double beta2) {
  if (!std::isfinite(beta1) || !std::isfinite(beta2)) throw ValidationError("betas must be finite");
  const double x = 2.0 * beta1 - 2.0 * beta2;
  const double t = std::tanh(2.0 * beta2);
  // x coth x, with its series near 0.
  const double x_coth = std::abs(x) < 1e-4 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
  const double denom = (1.0 - t) * (1.0 - t);
  return (x_coth + x * t) / denom;
}

BoundReport torus_adiabatic_bound(int n, int d, double epsilon, double beta1, double beta2,
                                  bool rescaled, double prefactor) {
  if (n < 3) throw ValidationError("torus bound: n must be >= 3");
  if (d < 1) throw ValidationError("torus bound: d must be >= 1");
  require_epsilon(epsilon);
  require_positive(prefactor, "prefactor");
  const double volume = std::pow(static_cast<double>(n), d * (rescaled ? 2 : 1));
  const double log_term = std::log(static_cast<double>(n)) + std::log(2.0 / epsilon);
  const double c = torus_constant_C(beta1, beta2);
  const double value = prefactor * c * (volume / epsilon) * log_term * log_term;
  return BoundReport{rescaled ? "torus_adiabatic_rescaled" : "torus_adiabatic",
                     value,
                     BoundKind::upper_order,
                     {{"n", static_cast<double>(n)},
                      {"d", static_cast<double>(d)},
                      {"epsilon", epsilon},
                      {"beta1", beta1},
                      {"beta2", beta2},
                      {"C", c},
                      {"prefactor", prefactor}},
                     "order bound; prefactor is calibrated, not a proven constant"};
}

ScalingFit fit_scaling_exponent(const std::vector<std::array<double, 2>>& samples) {
  if (samples.size() < 3) throw ValidationError("fit_scaling_exponent: need at least 3 samples");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw ValidationError("fit_scaling_exponent: samples must be positive");
    }
    mean_x += std::log(x);
    mean_y += std::log(y);
  }
  const double count = static_cast<double>(samples.size());
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : samples) {
    const double dx = std::log(x) - mean_x;
    const double dy = std::log(y) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ValidationError("fit_scaling_exponent: all x values are equal");
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  double ss_res = 0.0;
  for (const auto& [x, y] : samples) {
    const double r = std::log(y) - (intercept + slope * std::log(x));
    ss_res += r * r;
  }
  const double r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return ScalingFit{samples, slope, intercept, r2};
}

}  // namespace adiabatic
