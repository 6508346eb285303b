#include "selmod/normalizer.hpp"

#include "selmod/error.hpp"
#include "selmod/quadrature.hpp"
#include "selmod/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace selmod {

namespace {

// Accumulates sum_k p_k(mu) G(k) and its derivatives term by term.
struct SeriesAccumulator {
  PiResult r;

  void add(double p, double dp, double d2p, const GTerms& g) {
    r.pi += p * g.G;
    r.one_minus_pi += p * g.S;
    r.d_mu += dp * g.G + p * g.d_mu;
    r.d_tau += p * g.d_tau;
    r.d_mumu += d2p * g.G + 2.0 * dp * g.d_mu + p * g.d_mumu;
    r.d_tautau += p * g.d_tautau;
    r.d_mutau += dp * g.d_tau + p * g.d_mutau;
  }
};

PiResult zero_result() {
  PiResult r;
  r.one_minus_pi = 0.0;
  return r;
}

double count_tail(const ResponseFamily& family, double mu, int K) {
  if (family.kind() == FamilyKind::Poisson) return boost::math::gamma_p(K + 1.0, mu);
  const double kappa = family.kappa();
  return boost::math::ibeta(K + 1.0, kappa, mu / (mu + kappa));
}

}  // namespace

PiResult pi_binary(const SelectionMechanism& mech, double mu, double tau) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("binary mean must lie in (0,1)");
  SeriesAccumulator acc{zero_result()};
  acc.add(1.0 - mu, -1.0, 0.0, mech.G_terms(0.0, tau, mu));
  acc.add(mu, 1.0, 0.0, mech.G_terms(1.0, tau, mu));
  return acc.r;
}

PiResult pi_count(const SelectionMechanism& mech, const ResponseFamily& family, double mu, double tau,
                  int K) {
  if (K < 1) throw std::invalid_argument("truncation point K must be at least 1");
  if (family.kind() != FamilyKind::Poisson && family.kind() != FamilyKind::NegativeBinomial) {
    throw std::invalid_argument("series normalizer requires a count family");
  }
  if (!(mu > 0.0)) throw DomainError("count mean must be positive");
  SeriesAccumulator acc{zero_result()};
  const bool poisson = family.kind() == FamilyKind::Poisson;
  const double kappa = family.kappa();
  const double log_mu = std::log(mu);
  // log p_k built by recurrence from log p_0.
  double log_p = poisson ? -mu : kappa * std::log(kappa / (kappa + mu));
  const double log_ratio = poisson ? log_mu : std::log(mu / (kappa + mu));
  for (int k = 0; k <= K; ++k) {
    if (k > 0) {
      log_p += log_ratio - std::log(static_cast<double>(k));
      if (!poisson) log_p += std::log(k - 1.0 + kappa);
    }
    const double p = std::exp(log_p);
    double dl, d2l;
    if (poisson) {
      dl = k / mu - 1.0;
      d2l = -k / (mu * mu);
    } else {
      const double s = kappa + mu;
      dl = k / mu - (kappa + k) / s;
      d2l = -k / (mu * mu) + (kappa + k) / (s * s);
    }
    acc.add(p, p * dl, p * (dl * dl + d2l), mech.G_terms(static_cast<double>(k), tau, mu));
  }
  PiResult r = acc.r;
  r.truncation_K = K;
  r.tail_mass = count_tail(family, mu, K);
  r.one_minus_pi += r.tail_mass;
  r.tail_warning = r.tail_mass > kTailWarning;
  return r;
}

PiResult pi_mgf(const SelectionMechanism& mech, const ResponseFamily& family, double mu, double psi,
                double tau) {
  (void)psi;
  if (mech.h_kind() != HKind::MgfLinear) throw std::invalid_argument("pi_mgf requires the expn-mgf mechanism");
  if (!family.nonnegative_support()) {
    throw DomainError("MGF-linear mechanism requires a response with nonnegative support");
  }
  if (!family.in_mean_domain(mu)) throw DomainError("mean outside the domain of " + family.name());
  const double alpha = mech.alpha();
  if (alpha < 0.0) throw DomainError("MGF-linear mechanism requires alpha >= 0");

  // log(1 - pi) = -e^tau + A(mu) with A = log M(-alpha/mu).
  const double u = alpha / mu;
  const double e = std::exp(-u);
  const double m1 = e * (1.0 + u) - 1.0;  // d/dmu of mu(e^{-u} - 1)
  const double m2 = e * u * u / mu;
  double A, A1, A2;
  switch (family.kind()) {
    case FamilyKind::Poisson:
      A = -mu * (-std::expm1(-u));
      A1 = m1;
      A2 = m2;
      break;
    case FamilyKind::Bernoulli: {
      const double m = 1.0 - mu * (-std::expm1(-u));
      A = std::log(m);
      A1 = m1 / m;
      A2 = m2 / m - A1 * A1;
      break;
    }
    case FamilyKind::NegativeBinomial: {
      const double kappa = family.kappa();
      const double s = kappa + mu * (-std::expm1(-u));
      if (!(s > 0.0)) throw DomainError("negative binomial MGF diverges");
      A = kappa * std::log(kappa / s);
      A1 = kappa * m1 / s;
      A2 = kappa * (m2 / s + (m1 * m1) / (s * s));
      break;
    }
    default:
      throw DomainError("MGF-linear normalizer not available for " + family.name());
  }
  const double lam = std::exp(tau);
  const double L = -lam + A;
  const double Lmu = A1, Ltau = -lam;
  const double Lmumu = A2, Ltautau = -lam, Lmutau = 0.0;
  const double q = std::exp(L);

  PiResult r;
  r.one_minus_pi = q;
  r.pi = -std::expm1(L);
  r.d_mu = -q * Lmu;
  r.d_tau = -q * Ltau;
  r.d_mumu = -q * (Lmu * Lmu + Lmumu);
  r.d_tautau = -q * (Ltau * Ltau + Ltautau);
  r.d_mutau = -q * (Lmu * Ltau + Lmutau);
  return r;
}

PiResult pi_normal(const SelectionMechanism& mech, double mu, double psi, double tau) {
  if (!(psi > 0.0)) throw DomainError("normal variance must be positive");
  if (mech.standardized()) {
    throw DomainError("mechanism '" + mech.key() + "' needs a positive mean and is not available for the normal family");
  }
  const double sigma = std::sqrt(psi);
  auto integrand = [&](double z) {
    const double y = mu + sigma * z;
    const double w = special::norm_pdf(z);
    const HValues h = mech.h_eval(y, tau, mu);
    const HYDerivs hy = mech.h_y_derivs(y, tau, mu);
    const G0Values g = mech.g0_eval(h.h);
    const double Gy = g.pdf * hy.d_y;
    const double Gt = g.pdf * h.d_tau;
    const double Gyy = g.dpdf * hy.d_y * hy.d_y + g.pdf * hy.d_yy;
    const double Gtt = g.dpdf * h.d_tau * h.d_tau + g.pdf * h.d_tautau;
    const double Gyt = g.dpdf * hy.d_y * h.d_tau + g.pdf * hy.d_ytau;
    return std::array<double, 11>{w * g.cdf, w * g.sf,      w * Gy,           w * Gt,
                                  w * Gyy,   w * Gtt,       w * Gyt,          w * Gy * z,
                                  w * Gyy * z, w * Gyt * z, w * Gyy * z * z};
  };
  const auto q = quadrature::integrate<11>(integrand, -10.0, 10.0, 0.1 * kQuadratureTolerance);
  if (!q.converged || q.error > kQuadratureTolerance) {
    throw QuadratureError("normal selection probability did not reach tolerance (achieved " +
                              std::to_string(q.error) + ")",
                          q.error);
  }
  const auto& v = q.value;
  PiResult r;
  r.pi = v[0];
  r.one_minus_pi = v[1];
  r.d_mu = v[2];
  r.d_tau = v[3];
  r.d_mumu = v[4];
  r.d_tautau = v[5];
  r.d_mutau = v[6];
  const double ds = 1.0 / (2.0 * sigma);  // dsigma/dpsi
  r.d_psi = v[7] * ds;
  r.d_psimu = v[8] * ds;
  r.d_psitau = v[9] * ds;
  r.d_psipsi = (v[10] - v[7] / sigma) * ds * ds;
  return r;
}

int default_truncation(const ResponseFamily& family, double mu, double max_observed_y) {
  const double sd = std::sqrt(family.variance(mu, 1.0));
  double k = std::ceil(mu + 10.0 * sd + 20.0);
  if (family.kind() == FamilyKind::NegativeBinomial) {
    // Small kappa gives a near-geometric tail that 10 sd does not cover. With
    // R = sup_{j>=k} p_{j+1}/p_j < 1 the tail beyond k is at most p_k R/(1-R).
    const double kappa = family.kappa();
    const double log_q = std::log(mu / (mu + kappa));
    auto log_tail_bound = [&](double kk) {
      const double R = std::fmax(std::exp(log_q), std::exp(log_q) * (kk + kappa) / (kk + 1.0));
      if (!(R < 1.0)) return 0.0;
      const double log_p = std::lgamma(kk + kappa) - std::lgamma(kappa) - std::lgamma(kk + 1.0) +
                           kappa * std::log(kappa / (kappa + mu)) + kk * log_q;
      return log_p + std::log(R / (1.0 - R));
    };
    constexpr double kLogTarget = -34.5;  // about 1e-15
    while (log_tail_bound(k) > kLogTarget && k < 1e7) k = std::ceil(k * 1.25);
  }
  return static_cast<int>(std::fmax(std::ceil(max_observed_y), k));
}

PiResult selection_probability(const SelectionMechanism& mech, const ResponseFamily& family, double mu,
                               double psi, double tau, const TruncationPolicy& truncation) {
  if (mech.h_kind() == HKind::MgfLinear) return pi_mgf(mech, family, mu, psi, tau);
  switch (family.kind()) {
    case FamilyKind::Bernoulli:
      return pi_binary(mech, mu, tau);
    case FamilyKind::Poisson:
    case FamilyKind::NegativeBinomial: {
      const int K = truncation.fixed_K ? *truncation.fixed_K
                                       : default_truncation(family, mu, truncation.max_observed_y);
      return pi_count(mech, family, mu, tau, K);
    }
    case FamilyKind::Normal:
      return pi_normal(mech, mu, psi, tau);
  }
  throw std::logic_error("unhandled family");
}

}  // namespace selmod
