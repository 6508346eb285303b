#include "selmod/selection_mechanism.hpp"

#include "selmod/error.hpp"
#include "selmod/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace selmod {

namespace {

struct CatalogEntry {
  std::string_view key;
  G0Kind g0;
  HKind h;
};

constexpr std::array<CatalogEntry, 7> kCatalog{{
    {"probit-linear", G0Kind::StdNormal, HKind::Linear},
    {"probit-std", G0Kind::StdNormal, HKind::Standardized},
    {"logit-linear", G0Kind::Logistic, HKind::Linear},
    {"logit-std", G0Kind::Logistic, HKind::Standardized},
    {"gumbel-linear", G0Kind::UnitExponential, HKind::ExpLinear},
    {"gumbel-std", G0Kind::UnitExponential, HKind::ExpStandardized},
    {"expn-mgf", G0Kind::UnitExponential, HKind::MgfLinear},
}};

bool exponential_h(HKind h) {
  return h == HKind::ExpLinear || h == HKind::ExpStandardized || h == HKind::MgfLinear;
}

void require_positive_mean(double mu) {
  if (!(mu > 0.0)) throw DomainError("standardized selection mechanism requires mu > 0");
}

}  // namespace

SelectionMechanism::SelectionMechanism(G0Kind g0, HKind h, double alpha)
    : g0_(g0), h_(h), alpha_(alpha) {
  if ((g0 == G0Kind::UnitExponential) != exponential_h(h)) {
    throw std::invalid_argument(
        "exponential G0 must be paired with an exponentiated or MGF-linear h, and vice versa");
  }
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
}

SelectionMechanism SelectionMechanism::from_key(std::string_view key, double alpha) {
  for (const auto& entry : kCatalog) {
    if (entry.key == key) return {entry.g0, entry.h, alpha};
  }
  throw std::invalid_argument("unknown selection mechanism '" + std::string(key) + "'");
}

const std::vector<std::string>& SelectionMechanism::catalog_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : kCatalog) out.emplace_back(entry.key);
    return out;
  }();
  return keys;
}

std::string SelectionMechanism::key() const {
  for (const auto& entry : kCatalog) {
    if (entry.g0 == g0_ && entry.h == h_) return std::string(entry.key);
  }
  return "custom";
}

bool SelectionMechanism::standardized() const noexcept {
  return h_ == HKind::Standardized || h_ == HKind::ExpStandardized || h_ == HKind::MgfLinear;
}

G0Values SelectionMechanism::g0_eval(double t) const {
  if (!std::isfinite(t)) throw DomainError("G0 argument must be finite");
  switch (g0_) {
    case G0Kind::StdNormal: {
      const double pdf = special::norm_pdf(t);
      return {special::norm_cdf(t),      pdf,
              -t * pdf,                  special::norm_cdf(-t),
              special::log_norm_cdf(t),  special::log_norm_cdf(-t),
              special::norm_mills(t),    -t};
    }
    case G0Kind::Logistic: {
      const double cdf = special::logistic(t);
      const double sf = special::logistic(-t);
      const double pdf = cdf * sf;
      return {cdf, pdf, pdf * (sf - cdf), sf, -special::softplus(-t), -special::softplus(t), sf, sf - cdf};
    }
    case G0Kind::UnitExponential: {
      if (t < 0.0) throw DomainError("unit exponential G0 evaluated at a negative argument");
      const double sf = std::exp(-t);
      const double cdf = -std::expm1(-t);
      return {cdf, sf, -sf, sf, std::log(cdf), -t, 1.0 / std::expm1(t), -1.0};
    }
  }
  throw std::logic_error("unhandled G0");
}

HValues SelectionMechanism::h_eval(double y, double tau, double mu) const {
  const double a = alpha_;
  switch (h_) {
    case HKind::Linear:
      return {tau + a * y, 0.0, 1.0, 0.0, 0.0, 0.0};
    case HKind::Standardized: {
      require_positive_mean(mu);
      const double ay = a * y;
      return {tau + ay / mu, -ay / (mu * mu), 1.0, 2.0 * ay / (mu * mu * mu), 0.0, 0.0};
    }
    case HKind::ExpLinear: {
      const double e = std::exp(tau + a * y);
      return {e, 0.0, e, 0.0, e, 0.0};
    }
    case HKind::ExpStandardized: {
      require_positive_mean(mu);
      const double ay = a * y;
      const double s_mu = -ay / (mu * mu);
      const double s_mumu = 2.0 * ay / (mu * mu * mu);
      const double e = std::exp(tau + ay / mu);
      return {e, e * s_mu, e, e * (s_mu * s_mu + s_mumu), e, e * s_mu};
    }
    case HKind::MgfLinear: {
      require_positive_mean(mu);
      const double ay = a * y;
      const double lam = std::exp(tau);
      return {lam + ay / mu, -ay / (mu * mu), lam, 2.0 * ay / (mu * mu * mu), lam, 0.0};
    }
  }
  throw std::logic_error("unhandled h");
}

HYDerivs SelectionMechanism::h_y_derivs(double y, double tau, double mu) const {
  const double a = alpha_;
  switch (h_) {
    case HKind::Linear:
      return {a, 0.0, 0.0};
    case HKind::Standardized:
    case HKind::MgfLinear:
      require_positive_mean(mu);
      return {a / mu, 0.0, 0.0};
    case HKind::ExpLinear: {
      const double e = std::exp(tau + a * y);
      return {a * e, a * a * e, a * e};
    }
    case HKind::ExpStandardized: {
      require_positive_mean(mu);
      const double eta = a / mu;
      const double e = std::exp(tau + eta * y);
      return {eta * e, eta * eta * e, eta * e};
    }
  }
  throw std::logic_error("unhandled h");
}

double SelectionMechanism::G_eval(double y, double tau, double mu) const {
  return g0_eval(h_eval(y, tau, mu).h).cdf;
}

GTerms SelectionMechanism::G_terms(double y, double tau, double mu) const {
  const HValues h = h_eval(y, tau, mu);
  if (!std::isfinite(h.h)) throw DomainError("G0 argument must be finite");
  // Only cdf, sf and the density derivatives are needed here; skip the logs.
  struct {
    double cdf, sf, pdf, dpdf;
  } g{};
  switch (g0_) {
    case G0Kind::StdNormal:
      g.pdf = special::norm_pdf(h.h);
      g.cdf = special::norm_cdf(h.h);
      g.sf = special::norm_cdf(-h.h);
      g.dpdf = -h.h * g.pdf;
      break;
    case G0Kind::Logistic:
      g.cdf = special::logistic(h.h);
      g.sf = special::logistic(-h.h);
      g.pdf = g.cdf * g.sf;
      g.dpdf = g.pdf * (g.sf - g.cdf);
      break;
    case G0Kind::UnitExponential:
      if (h.h < 0.0) throw DomainError("unit exponential G0 evaluated at a negative argument");
      g.sf = std::exp(-h.h);
      g.cdf = -std::expm1(-h.h);
      g.pdf = g.sf;
      g.dpdf = -g.sf;
      break;
  }
  return {g.cdf,
          g.sf,
          g.pdf * h.d_mu,
          g.pdf * h.d_tau,
          g.dpdf * h.d_mu * h.d_mu + g.pdf * h.d_mumu,
          g.dpdf * h.d_tau * h.d_tau + g.pdf * h.d_tautau,
          g.dpdf * h.d_mu * h.d_tau + g.pdf * h.d_mutau};
}

LogGTerms SelectionMechanism::log_G_terms(double y, double tau, double mu) const {
  const HValues h = h_eval(y, tau, mu);
  const G0Values g = g0_eval(h.h);
  const double r = g.mills;
  // d^2 log G0 / dt^2 = g0'/G0 - (g0/G0)^2
  const double c = g.dlog_pdf * r - r * r;
  return {g.log_cdf,
          r * h.d_mu,
          r * h.d_tau,
          c * h.d_mu * h.d_mu + r * h.d_mumu,
          c * h.d_tau * h.d_tau + r * h.d_tautau,
          c * h.d_mu * h.d_tau + r * h.d_mutau};
}

double SelectionMechanism::log_odds_lambda(double tau, double mu) const {
  const G0Values g0 = g0_eval(h_eval(0.0, tau, mu).h);
  const G0Values g1 = g0_eval(h_eval(1.0, tau, mu).h);
  const double inf = std::numeric_limits<double>::infinity();
  const bool num_zero = g0.sf == 0.0 || g1.cdf == 0.0;
  const bool den_zero = g0.cdf == 0.0 || g1.sf == 0.0;
  if (num_zero && den_zero) return std::numeric_limits<double>::quiet_NaN();
  if (num_zero) return -inf;
  if (den_zero) return inf;
  return (g0.log_sf + g1.log_cdf) - (g0.log_cdf + g1.log_sf);
}

}  // namespace selmod
