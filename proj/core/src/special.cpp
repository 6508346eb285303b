#include "selmod/special.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <limits>
#include <stdexcept>

namespace selmod::special {

namespace {
// Below this point erfc(-x/sqrt2) underflows to a denormal; switch to the
// asymptotic expansion of the Mills ratio.
constexpr double kLeftTail = -37.0;

double log_norm_cdf_asymptotic(double x) {
  const double z2 = 1.0 / (x * x);
  const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2)));
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}
}  // namespace

double log_norm_cdf(double x) {
  if (x > kLeftTail) return std::log(norm_cdf(x));
  return log_norm_cdf_asymptotic(x);
}

double norm_mills(double x) {
  if (x > kLeftTail) return norm_pdf(x) / norm_cdf(x);
  return std::exp(-0.5 * x * x - kLogSqrt2Pi - log_norm_cdf_asymptotic(x));
}

double norm_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chi2_1_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
  const double r = boost::math::erf_inv(level);
  return 2.0 * r * r;
}

}  // namespace selmod::special
