#include "selmod/error.hpp"
#include "selmod/selection_mechanism.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using selmod::G0Kind;
using selmod::HKind;
using selmod::SelectionMechanism;

TEST(G0Eval, Examples) {
  const auto n = SelectionMechanism(G0Kind::StdNormal, HKind::Linear).g0_eval(0.0);
  EXPECT_DOUBLE_EQ(n.cdf, 0.5);
  EXPECT_NEAR(n.pdf, 0.39894, 5e-6);
  EXPECT_DOUBLE_EQ(n.dpdf, 0.0);
  const auto l = SelectionMechanism(G0Kind::Logistic, HKind::Linear).g0_eval(0.0);
  EXPECT_DOUBLE_EQ(l.cdf, 0.5);
  EXPECT_DOUBLE_EQ(l.pdf, 0.25);
  EXPECT_DOUBLE_EQ(l.dpdf, 0.0);
  const auto e = SelectionMechanism(G0Kind::UnitExponential, HKind::ExpLinear).g0_eval(1.0);
  EXPECT_NEAR(e.cdf, 0.63212, 5e-6);
  EXPECT_NEAR(e.pdf, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(e.dpdf, -std::exp(-1.0), 1e-15);
}

TEST(G0Eval, ExponentialRejectsNegative) {
  EXPECT_THROW(SelectionMechanism(G0Kind::UnitExponential, HKind::MgfLinear).g0_eval(-0.1), selmod::DomainError);
}

TEST(G0Eval, DensityMatchesFiniteDifferences) {
  for (G0Kind g : {G0Kind::StdNormal, G0Kind::Logistic, G0Kind::UnitExponential}) {
    const SelectionMechanism m(g, g == G0Kind::UnitExponential ? HKind::ExpLinear : HKind::Linear);
    for (double t : {0.3, 1.1, 2.5, g == G0Kind::UnitExponential ? 0.05 : -1.7}) {
      const double h = 1e-6;
      const auto c = m.g0_eval(t);
      EXPECT_LT(oracle::rel_err(c.pdf, (m.g0_eval(t + h).cdf - m.g0_eval(t - h).cdf) / (2 * h), 1e-3), 1e-6);
      EXPECT_LT(oracle::rel_err(c.dpdf, (m.g0_eval(t + h).pdf - m.g0_eval(t - h).pdf) / (2 * h), 1e-3), 1e-5);
      EXPECT_NEAR(c.cdf + c.sf, 1.0, 1e-15);
      EXPECT_NEAR(std::exp(c.log_cdf), c.cdf, 1e-14);
    }
  }
}

TEST(HEval, Examples) {
  const auto lin = SelectionMechanism::from_key("probit-linear", 0.0).h_eval(5.0, 1.3, 2.0);
  EXPECT_DOUBLE_EQ(lin.h, 1.3);
  EXPECT_DOUBLE_EQ(SelectionMechanism::from_key("probit-linear", 0.0).h_y_derivs(5.0, 1.3, 2.0).d_y, 0.0);

  const auto s = SelectionMechanism::from_key("probit-std", 2.0).h_eval(3.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(s.h, 6.0);
  EXPECT_DOUBLE_EQ(s.d_mu, -6.0);
  EXPECT_DOUBLE_EQ(s.d_tau, 1.0);
  EXPECT_DOUBLE_EQ(s.d_mumu, 12.0);
  EXPECT_DOUBLE_EQ(s.d_tautau, 0.0);
  EXPECT_DOUBLE_EQ(s.d_mutau, 0.0);

  const auto m = SelectionMechanism::from_key("expn-mgf", 1.0).h_eval(0.0, 0.0, 5.0);
  EXPECT_DOUBLE_EQ(m.h, 1.0);
  EXPECT_DOUBLE_EQ(m.d_mu, 0.0);
  EXPECT_DOUBLE_EQ(m.d_tau, 1.0);
  EXPECT_DOUBLE_EQ(m.d_mumu, 0.0);
  EXPECT_DOUBLE_EQ(m.d_tautau, 1.0);
  EXPECT_DOUBLE_EQ(m.d_mutau, 0.0);
}

TEST(HEval, RequiresPositiveMean) {
  EXPECT_THROW(SelectionMechanism::from_key("logit-std", 1.0).h_eval(1.0, 0.0, 0.0), selmod::DomainError);
  EXPECT_THROW(SelectionMechanism::from_key("gumbel-std", 1.0).h_eval(1.0, 0.0, -2.0), selmod::DomainError);
}

TEST(HEval, PartialsMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    for (int rep = 0; rep < 20; ++rep) {
      const double alpha = key == "expn-mgf" ? 0.5 + 0.5 * u(rng) : u(rng);
      const auto m = SelectionMechanism::from_key(key, alpha);
      const double y = 3.0 + 2.0 * u(rng), tau = 0.5 * u(rng), mu = 2.0 + u(rng);
      const double e = 1e-5;
      const auto c = m.h_eval(y, tau, mu);
      auto H = [&](double t, double mm) { return m.h_eval(y, t, mm); };
      EXPECT_LT(oracle::rel_err(c.h, oracle::h(m.h_kind(), alpha, y, tau, mu)), 1e-14) << key;
      EXPECT_LT(oracle::rel_err(c.d_mu, (H(tau, mu + e).h - H(tau, mu - e).h) / (2 * e)), 1e-6) << key;
      EXPECT_LT(oracle::rel_err(c.d_tau, (H(tau + e, mu).h - H(tau - e, mu).h) / (2 * e)), 1e-6) << key;
      EXPECT_LT(oracle::rel_err(c.d_mumu, (H(tau, mu + e).d_mu - H(tau, mu - e).d_mu) / (2 * e)), 1e-6) << key;
      EXPECT_LT(oracle::rel_err(c.d_tautau, (H(tau + e, mu).d_tau - H(tau - e, mu).d_tau) / (2 * e)), 1e-6) << key;
      EXPECT_LT(oracle::rel_err(c.d_mutau, (H(tau + e, mu).d_mu - H(tau - e, mu).d_mu) / (2 * e)), 1e-6) << key;
      const auto yd = m.h_y_derivs(y, tau, mu);
      EXPECT_LT(oracle::rel_err(yd.d_y, (m.h_eval(y + e, tau, mu).h - m.h_eval(y - e, tau, mu).h) / (2 * e)), 1e-6) << key;
    }
  }
}

TEST(GEval, Examples) {
  for (double y : {0.0, 1.0, 7.5}) {
    EXPECT_DOUBLE_EQ(SelectionMechanism::from_key("probit-linear", 0.0).G_eval(y, 0.0, 1.0), 0.5);
    EXPECT_NEAR(SelectionMechanism::from_key("gumbel-linear", 0.0).G_eval(y, 0.0, 1.0), 0.63212, 5e-6);
  }
  EXPECT_NEAR(SelectionMechanism::from_key("expn-mgf", 0.0).G_eval(4.0, 0.0, 2.0), 1.0 - std::exp(-1.0), 1e-15);
}

TEST(GEval, GumbelForm) {
  // 1 - exp(-exp(tau + alpha y)) is a Gumbel (minimum) distribution function.
  const auto m = SelectionMechanism::from_key("gumbel-linear", 0.4);
  for (double y : {0.0, 2.0, 5.0}) EXPECT_NEAR(m.G_eval(y, -0.3, 1.0), 1.0 - std::exp(-std::exp(-0.3 + 0.4 * y)), 1e-15);
}

TEST(GEval, MonotoneInY) {
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    const auto pos = SelectionMechanism::from_key(key, 0.7);
    const auto zero = SelectionMechanism::from_key(key, 0.0);
    double prev = -1.0;
    for (int y = 0; y <= 20; ++y) {
      const double g = pos.G_eval(y, -0.5, 3.0);
      EXPECT_GE(g, prev) << key;
      prev = g;
      EXPECT_DOUBLE_EQ(zero.G_eval(y, -0.5, 3.0), zero.G_eval(0.0, -0.5, 3.0)) << key;
    }
  }
}

TEST(LogOddsLambda, Examples) {
  const double expected = std::log(oracle::Phi(1.0) / (1.0 - oracle::Phi(1.0)));
  EXPECT_NEAR(SelectionMechanism::from_key("probit-linear", 1.0).log_odds_lambda(0.0, 0.5), expected, 1e-13);
  EXPECT_NEAR(SelectionMechanism::from_key("probit-linear", 1.0).log_odds_lambda(0.0, 0.5), 1.6683, 5e-5);
  EXPECT_NEAR(SelectionMechanism::from_key("probit-linear", -1.0).log_odds_lambda(0.0, 0.5), -expected, 1e-13);
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    EXPECT_DOUBLE_EQ(SelectionMechanism::from_key(key, 0.0).log_odds_lambda(0.3, 0.4), 0.0) << key;
  }
}

TEST(LogOddsLambda, SignMatchesGDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    for (int rep = 0; rep < 25; ++rep) {
      const double alpha = key == "expn-mgf" ? std::fabs(u(rng)) : u(rng);
      const auto m = SelectionMechanism::from_key(key, alpha);
      const double tau = u(rng), mu = 0.2 + 0.25 * (u(rng) + 1.5);
      const double diff = m.G_eval(1.0, tau, mu) - m.G_eval(0.0, tau, mu);
      const double lam = m.log_odds_lambda(tau, mu);
      EXPECT_EQ((lam > 0) - (lam < 0), (diff > 0) - (diff < 0)) << key << " alpha=" << alpha;
    }
  }
}

TEST(LogOddsLambda, FlagsDegenerateCells) {
  // G(1) = 1 to double precision
  EXPECT_TRUE(std::isinf(SelectionMechanism::from_key("probit-linear", 60.0).log_odds_lambda(0.0, 0.5)));
}

TEST(Catalog, KeysAndPairingRules) {
  EXPECT_EQ(SelectionMechanism::catalog_keys().size(), 7u);
  for (const auto& key : SelectionMechanism::catalog_keys()) EXPECT_EQ(SelectionMechanism::from_key(key).key(), key);
  EXPECT_THROW(SelectionMechanism::from_key("cauchit"), std::invalid_argument);
  EXPECT_THROW(SelectionMechanism(G0Kind::StdNormal, HKind::ExpLinear), std::invalid_argument);
  EXPECT_THROW(SelectionMechanism(G0Kind::UnitExponential, HKind::Linear), std::invalid_argument);
}
