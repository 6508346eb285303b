#include "selmod/response_family.hpp"

#include "selmod/error.hpp"
#include "selmod/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace selmod {

namespace {

bool is_count(double y) { return y >= 0.0 && std::isfinite(y) && y == std::floor(y); }

void require_link(bool ok, FamilyKind, Link link, const char* family) {
  if (!ok) {
    throw std::invalid_argument(std::string("link '") + std::string(to_string(link)) +
                                "' is not available for the " + family + " family");
  }
}

}  // namespace

std::string_view to_string(Link link) {
  switch (link) {
    case Link::Logit: return "logit";
    case Link::Probit: return "probit";
    case Link::Log: return "log";
    case Link::Identity: return "identity";
    case Link::Cloglog: return "cloglog";
  }
  return "?";
}

Link link_from_string(std::string_view key) {
  if (key == "logit") return Link::Logit;
  if (key == "probit") return Link::Probit;
  if (key == "log") return Link::Log;
  if (key == "identity") return Link::Identity;
  if (key == "cloglog") return Link::Cloglog;
  throw std::invalid_argument("unknown link '" + std::string(key) + "'");
}

LinkDerivs link_derivs(Link link, double mu) {
  switch (link) {
    case Link::Identity:
      return {mu, 1.0, 0.0};
    case Link::Log:
      if (!(mu > 0.0)) throw DomainError("log link requires mu > 0");
      return {std::log(mu), 1.0 / mu, -1.0 / (mu * mu)};
    case Link::Logit: {
      if (!(mu > 0.0 && mu < 1.0)) throw DomainError("logit link requires 0 < mu < 1");
      const double v = mu * (1.0 - mu);
      return {std::log(mu / (1.0 - mu)), 1.0 / v, (2.0 * mu - 1.0) / (v * v)};
    }
    case Link::Probit: {
      if (!(mu > 0.0 && mu < 1.0)) throw DomainError("probit link requires 0 < mu < 1");
      const double q = special::norm_quantile(mu);
      const double dens = special::norm_pdf(q);
      return {q, 1.0 / dens, q / (dens * dens)};
    }
    case Link::Cloglog: {
      if (!(mu > 0.0 && mu < 1.0)) throw DomainError("cloglog link requires 0 < mu < 1");
      const double u = 1.0 - mu;
      const double l = -std::log1p(-mu);
      const double ul = u * l;
      return {std::log(l), 1.0 / ul, (l - 1.0) / (ul * ul)};
    }
  }
  throw std::logic_error("unhandled link");
}

double link_inverse(Link link, double eta) {
  switch (link) {
    case Link::Identity: return eta;
    case Link::Log: return std::exp(eta);
    case Link::Logit: return special::logistic(eta);
    case Link::Probit: return special::norm_cdf(eta);
    case Link::Cloglog: return -std::expm1(-std::exp(eta));
  }
  throw std::logic_error("unhandled link");
}

ResponseFamily::ResponseFamily(FamilyKind kind, Link link, double kappa)
    : kind_(kind), link_(link), kappa_(kappa) {}

ResponseFamily ResponseFamily::bernoulli(Link link) {
  require_link(link == Link::Logit || link == Link::Probit || link == Link::Cloglog,
               FamilyKind::Bernoulli, link, "bernoulli");
  return {FamilyKind::Bernoulli, link, 0.0};
}

ResponseFamily ResponseFamily::poisson(Link link) {
  require_link(link == Link::Log, FamilyKind::Poisson, link, "poisson");
  return {FamilyKind::Poisson, link, 0.0};
}

ResponseFamily ResponseFamily::negative_binomial(double kappa, Link link) {
  require_link(link == Link::Log, FamilyKind::NegativeBinomial, link, "negative binomial");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("negative binomial size kappa must be positive and finite");
  }
  return {FamilyKind::NegativeBinomial, link, kappa};
}

ResponseFamily ResponseFamily::normal(Link link) {
  require_link(link == Link::Identity, FamilyKind::Normal, link, "normal");
  return {FamilyKind::Normal, link, 0.0};
}

std::string ResponseFamily::name() const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return "bernoulli";
    case FamilyKind::Poisson: return "poisson";
    case FamilyKind::NegativeBinomial: return "negbin";
    case FamilyKind::Normal: return "normal";
  }
  return "?";
}

bool ResponseFamily::in_support(double y) const noexcept {
  switch (kind_) {
    case FamilyKind::Bernoulli: return y == 0.0 || y == 1.0;
    case FamilyKind::Poisson:
    case FamilyKind::NegativeBinomial: return is_count(y);
    case FamilyKind::Normal: return std::isfinite(y);
  }
  return false;
}

bool ResponseFamily::in_mean_domain(double mu) const noexcept {
  switch (kind_) {
    case FamilyKind::Bernoulli: return mu > 0.0 && mu < 1.0;
    case FamilyKind::Poisson:
    case FamilyKind::NegativeBinomial: return mu > 0.0 && std::isfinite(mu);
    case FamilyKind::Normal: return std::isfinite(mu);
  }
  return false;
}

double ResponseFamily::theta_of_mu(double mu) const {
  if (!in_mean_domain(mu)) throw DomainError("mean outside the domain of " + name());
  switch (kind_) {
    case FamilyKind::Bernoulli: return std::log(mu / (1.0 - mu));
    case FamilyKind::Poisson: return std::log(mu);
    case FamilyKind::NegativeBinomial: return std::log(mu / (mu + kappa_));
    case FamilyKind::Normal: return mu;
  }
  throw std::logic_error("unhandled family");
}

BDerivs ResponseFamily::b_derivs(double theta) const {
  if (!std::isfinite(theta)) throw DomainError("canonical parameter must be finite");
  switch (kind_) {
    case FamilyKind::Bernoulli: {
      const double mu = special::logistic(theta);
      const double v = mu * (1.0 - mu);
      return {special::softplus(theta), mu, v, v * (1.0 - 2.0 * mu)};
    }
    case FamilyKind::Poisson: {
      const double e = std::exp(theta);
      return {e, e, e, e};
    }
    case FamilyKind::NegativeBinomial: {
      if (!(theta < 0.0)) throw DomainError("negative binomial canonical parameter must be negative");
      const double p = std::exp(theta);
      const double q = -std::expm1(theta);
      return {-kappa_ * std::log(q), kappa_ * p / q, kappa_ * p / (q * q),
              kappa_ * p * (1.0 + p) / (q * q * q)};
    }
    case FamilyKind::Normal:
      return {0.5 * theta * theta, theta, 1.0, 0.0};
  }
  throw std::logic_error("unhandled family");
}

DispersionDerivs ResponseFamily::dispersion(double psi) const {
  if (kind_ == FamilyKind::Normal) return {psi, 1.0, 0.0};
  return {1.0, 0.0, 0.0};
}

CarrierDerivs ResponseFamily::carrier(double y, double psi) const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return {0.0, 0.0, 0.0};
    case FamilyKind::Poisson: return {-std::lgamma(y + 1.0), 0.0, 0.0};
    case FamilyKind::NegativeBinomial:
      return {std::lgamma(y + kappa_) - std::lgamma(kappa_) - std::lgamma(y + 1.0), 0.0, 0.0};
    case FamilyKind::Normal: {
      const double y2 = y * y;
      return {-0.5 * y2 / psi - 0.5 * std::log(2.0 * std::numbers::pi * psi),
              0.5 * y2 / (psi * psi) - 0.5 / psi,
              -y2 / (psi * psi * psi) + 0.5 / (psi * psi)};
    }
  }
  throw std::logic_error("unhandled family");
}

double ResponseFamily::variance(double mu, double psi) const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return mu * (1.0 - mu);
    case FamilyKind::Poisson: return mu;
    case FamilyKind::NegativeBinomial: return mu + mu * mu / kappa_;
    case FamilyKind::Normal: return psi;
  }
  throw std::logic_error("unhandled family");
}

double ResponseFamily::log_pf(double y, double mu, double psi) const {
  if (!in_support(y)) throw SupportError("response value outside the support of " + name());
  if (!in_mean_domain(mu)) throw DomainError("mean outside the domain of " + name());
  switch (kind_) {
    case FamilyKind::Bernoulli:
      return y == 1.0 ? std::log(mu) : std::log1p(-mu);
    case FamilyKind::Poisson:
      return y * std::log(mu) - mu - std::lgamma(y + 1.0);
    case FamilyKind::NegativeBinomial: {
      const double s = kappa_ + mu;
      return std::lgamma(y + kappa_) - std::lgamma(kappa_) - std::lgamma(y + 1.0) +
             kappa_ * std::log(kappa_ / s) + (y > 0.0 ? y * std::log(mu / s) : 0.0);
    }
    case FamilyKind::Normal: {
      if (!(psi > 0.0)) throw DomainError("normal variance must be positive");
      const double r = y - mu;
      return -0.5 * r * r / psi - 0.5 * std::log(2.0 * std::numbers::pi * psi);
    }
  }
  throw std::logic_error("unhandled family");
}

double ResponseFamily::mgf(double mu, double psi, double t) const {
  if (!in_mean_domain(mu)) throw DomainError("mean outside the domain of " + name());
  switch (kind_) {
    case FamilyKind::Bernoulli:
      return 1.0 + mu * std::expm1(t);
    case FamilyKind::Poisson:
      return std::exp(mu * std::expm1(t));
    case FamilyKind::NegativeBinomial: {
      const double denom = kappa_ - mu * std::expm1(t);
      if (!(denom > 0.0)) throw DomainError("negative binomial MGF diverges at this t");
      return std::pow(kappa_ / denom, kappa_);
    }
    case FamilyKind::Normal:
      return std::exp(mu * t + 0.5 * psi * t * t);
  }
  throw std::logic_error("unhandled family");
}

double ResponseFamily::clamp_mean(double mu) const noexcept {
  switch (kind_) {
    case FamilyKind::Bernoulli:
      return std::fmin(std::fmax(mu, kMeanClamp), 1.0 - kMeanClamp);
    case FamilyKind::Poisson:
    case FamilyKind::NegativeBinomial:
      return std::fmax(mu, kMeanClamp);
    case FamilyKind::Normal:
      return mu;
  }
  return mu;
}

double ResponseFamily::mean_from_eta(double eta) const { return clamp_mean(link_inverse(link_, eta)); }

}  // namespace selmod
