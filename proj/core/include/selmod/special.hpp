#pragma once

// Scalar special functions shared by the families, mechanisms and simulator.

#include <cmath>
#include <numbers>

namespace selmod::special {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// log Phi(x), accurate in the far left tail where Phi underflows.
double log_norm_cdf(double x);

// phi(x) / Phi(x) without underflow.
double norm_mills(double x);

// Inverse of the standard normal distribution function.
double norm_quantile(double p);

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Upper quantile of chi-square with one degree of freedom at the given level,
// via q = 2 * erfinv(level)^2.
double chi2_1_quantile(double level);

}  // namespace selmod::special
