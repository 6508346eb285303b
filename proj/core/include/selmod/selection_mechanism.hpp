#pragma once

// Selection mechanisms G(y) = G0{h(y)}: a value y drawn from the response
// distribution is observed when an independent T ~ G0 satisfies T <= h(y).

#include <string>
#include <string_view>
#include <vector>

namespace selmod {

enum class G0Kind { StdNormal, Logistic, UnitExponential };

enum class HKind {
  Linear,           // tau + alpha*y
  Standardized,     // tau + eta*y,  eta = alpha/mu
  ExpLinear,        // exp(tau + alpha*y)
  ExpStandardized,  // exp(tau + eta*y)
  MgfLinear,        // exp(tau) + eta*y,  alpha >= 0
};

struct G0Values {
  double cdf;
  double pdf;
  double dpdf;
  double sf;          // 1 - cdf, computed directly
  double log_cdf;
  double log_sf;
  double mills;       // pdf / cdf
  double dlog_pdf;    // dpdf / pdf
};

// h and its partial derivatives in (mu, tau).
struct HValues {
  double h;
  double d_mu;
  double d_tau;
  double d_mumu;
  double d_tautau;
  double d_mutau;
};

// y-derivatives of h, needed when integrating over a continuous response.
struct HYDerivs {
  double d_y;
  double d_yy;
  double d_ytau;
};

// G(y) = G0{h(y)} and its partials in (mu, tau), with the survival 1 - G.
struct GTerms {
  double G;
  double S;
  double d_mu;
  double d_tau;
  double d_mumu;
  double d_tautau;
  double d_mutau;
};

// log G(y) and its partials in (mu, tau).
struct LogGTerms {
  double value;
  double d_mu;
  double d_tau;
  double d_mumu;
  double d_tautau;
  double d_mutau;
};

class SelectionMechanism {
 public:
  SelectionMechanism(G0Kind g0, HKind h, double alpha = 0.0);

  // Keys: probit-linear, probit-std, logit-linear, logit-std, gumbel-linear,
  // gumbel-std, expn-mgf.
  static SelectionMechanism from_key(std::string_view key, double alpha = 0.0);
  static const std::vector<std::string>& catalog_keys();

  G0Kind g0_kind() const noexcept { return g0_; }
  HKind h_kind() const noexcept { return h_; }
  double alpha() const noexcept { return alpha_; }
  std::string key() const;

  SelectionMechanism with_alpha(double alpha) const { return {g0_, h_, alpha}; }

  // h depends on mu through eta = alpha/mu.
  bool standardized() const noexcept;
  bool requires_positive_mean() const noexcept { return standardized(); }
  bool requires_nonnegative_support() const noexcept { return h_ == HKind::MgfLinear; }
  bool requires_nonnegative_alpha() const noexcept { return h_ == HKind::MgfLinear; }

  G0Values g0_eval(double t) const;
  HValues h_eval(double y, double tau, double mu) const;
  HYDerivs h_y_derivs(double y, double tau, double mu) const;

  double G_eval(double y, double tau, double mu) const;
  GTerms G_terms(double y, double tau, double mu) const;
  LogGTerms log_G_terms(double y, double tau, double mu) const;

  // log{[1-G(0)] G(1)} - log{G(0) [1-G(1)]}; +-infinity when a cell probability
  // is 0 or 1.
  double log_odds_lambda(double tau, double mu) const;

 private:
  G0Kind g0_;
  HKind h_;
  double alpha_;
};

}  // namespace selmod
