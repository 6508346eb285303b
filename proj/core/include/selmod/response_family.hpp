#pragma once

// Exponential-family response distributions
//
//   f(y; theta, psi) = exp{ (y*theta - b(theta)) / a(psi) + d(y, psi) }
//
// with mean mu = b'(theta) and variance a(psi) b''(theta). Each family also
// carries the link g with g(mu) = x'beta.

#include <string>
#include <string_view>

namespace selmod {

enum class FamilyKind { Bernoulli, Poisson, NegativeBinomial, Normal };

// Cloglog is only used for the selection GLM under exponential G0.
enum class Link { Logit, Probit, Log, Identity, Cloglog };

struct BDerivs {
  double b;
  double b1;  // mu
  double b2;
  double b3;
};

struct LinkDerivs {
  double value;
  double d1;
  double d2;
};

// a(psi) and its first two derivatives.
struct DispersionDerivs {
  double a;
  double a1;
  double a2;
};

// d(y, psi) and its first two psi-derivatives.
struct CarrierDerivs {
  double d;
  double d_psi;
  double d_psipsi;
};

// Link value and derivatives; throws DomainError at the boundary of the link domain.
LinkDerivs link_derivs(Link link, double mu);
double link_inverse(Link link, double eta);

std::string_view to_string(Link link);
Link link_from_string(std::string_view key);

class ResponseFamily {
 public:
  static ResponseFamily bernoulli(Link link = Link::Logit);
  static ResponseFamily poisson(Link link = Link::Log);
  // NB2 with known size kappa: Var(Y) = mu + mu^2 / kappa.
  static ResponseFamily negative_binomial(double kappa, Link link = Link::Log);
  static ResponseFamily normal(Link link = Link::Identity);

  FamilyKind kind() const noexcept { return kind_; }
  Link link() const noexcept { return link_; }
  double kappa() const noexcept { return kappa_; }
  bool dispersion_known() const noexcept { return kind_ != FamilyKind::Normal; }
  bool discrete() const noexcept { return kind_ != FamilyKind::Normal; }
  bool nonnegative_support() const noexcept { return kind_ != FamilyKind::Normal; }
  std::string name() const;

  bool in_support(double y) const noexcept;
  bool in_mean_domain(double mu) const noexcept;

  // Canonical parameter with b'(theta) = mu.
  double theta_of_mu(double mu) const;
  BDerivs b_derivs(double theta) const;
  DispersionDerivs dispersion(double psi) const;
  CarrierDerivs carrier(double y, double psi) const;

  // Variance Var(Y) for mean mu and dispersion psi.
  double variance(double mu, double psi) const;

  double log_pf(double y, double mu, double psi) const;

  // E[exp(tY)]; throws DomainError outside the convergence region.
  double mgf(double mu, double psi, double t) const;

  // Inverse link followed by clamping into the open mean domain.
  double mean_from_eta(double eta) const;
  double clamp_mean(double mu) const noexcept;

 private:
  ResponseFamily(FamilyKind kind, Link link, double kappa);

  FamilyKind kind_;
  Link link_;
  double kappa_;
};

inline constexpr double kMeanClamp = 1e-12;

}  // namespace selmod
