#include "selmod/error.hpp"
#include "selmod/normalizer.hpp"
#include "selmod/quadrature.hpp"
#include "selmod/simulator.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using selmod::ResponseFamily;
using selmod::SelectionMechanism;

namespace {

const double kE1 = 1.0 - std::exp(-1.0);

}  // namespace

TEST(PiBinary, Examples) {
  EXPECT_DOUBLE_EQ(selmod::pi_binary(SelectionMechanism::from_key("probit-linear", 0.0), 0.3, 0.0).pi, 0.5);
  EXPECT_NEAR(selmod::pi_binary(SelectionMechanism::from_key("logit-linear", 0.0), 0.3, 0.7).pi,
              oracle::G0(selmod::G0Kind::Logistic, 0.7), 1e-15);
  const auto r = selmod::pi_binary(SelectionMechanism::from_key("probit-linear", 1.0), 0.5, 0.0);
  EXPECT_NEAR(r.pi, 0.25 + 0.5 * oracle::Phi(1.0), 1e-15);
  EXPECT_NEAR(r.pi, 0.6707, 5e-5);
  EXPECT_DOUBLE_EQ(selmod::pi_binary(SelectionMechanism::from_key("probit-linear", 0.0), 0.3, 0.4).d_mu, 0.0);
}

TEST(PiBinary, ExhaustiveSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto m = SelectionMechanism::from_key(key, key == "expn-mgf" ? u(rng) : 2 * u(rng) - 1);
      const double mu = u(rng), tau = 2 * u(rng) - 1;
      const auto r = selmod::selection_probability(m, ResponseFamily::bernoulli(), mu, 1.0, tau);
      EXPECT_NEAR(r.pi, oracle::pi(ResponseFamily::bernoulli(), m, mu, 1.0, tau), 1e-15) << key;
      EXPECT_NEAR(r.pi + r.one_minus_pi, 1.0, 1e-15) << key;
    }
  }
}

TEST(PiCount, IndependenceCase) {
  const auto m = SelectionMechanism::from_key("probit-linear", 0.0);
  const auto f = ResponseFamily::poisson();
  const auto r = selmod::pi_count(m, f, 3.0, 0.4, 60);
  EXPECT_NEAR(r.pi, oracle::Phi(0.4) * (1.0 - r.tail_mass), 1e-15);
  EXPECT_NEAR(r.pi, oracle::Phi(0.4), 1e-15);
}

TEST(PiCount, BruteForceAtK500) {
  const auto m = SelectionMechanism::from_key("probit-linear", 0.5);
  const auto f = ResponseFamily::poisson();
  const auto r = selmod::pi_count(m, f, 2.0, 0.0, 60);
  EXPECT_NEAR(r.pi, oracle::pi(f, m, 2.0, 1.0, 0.0), 1e-12);
  EXPECT_LT(r.tail_mass, 1e-30);
  EXPECT_FALSE(r.tail_warning);
  ASSERT_TRUE(r.truncation_K.has_value());
  EXPECT_EQ(*r.truncation_K, 60);
}

TEST(PiCount, TailWarningWhenTruncatedEarly) {
  const auto r = selmod::pi_count(SelectionMechanism::from_key("probit-linear", 0.1), ResponseFamily::poisson(), 10.0, 0.0, 12);
  EXPECT_TRUE(r.tail_warning);
  EXPECT_GT(r.tail_mass, 1e-10);
  EXPECT_NEAR(r.pi + r.one_minus_pi, 1.0, 1e-14);
}

TEST(PiCount, MonotoneInKAndTailBounded) {
  for (const auto& f : {ResponseFamily::poisson(), ResponseFamily::negative_binomial(1.3)}) {
    const auto m = SelectionMechanism::from_key("logit-std", 0.6);
    double prev = 0.0;
    for (int K = 1; K <= 80; ++K) {
      const auto r = selmod::pi_count(m, f, 4.0, -0.2, K);
      EXPECT_GE(r.pi, prev);
      prev = r.pi;
      const auto bigger = selmod::pi_count(m, f, 4.0, -0.2, K + K / 2);
      EXPECT_LE(bigger.pi - r.pi, r.tail_mass * (1 + 1e-12) + 1e-16) << f.name() << " K=" << K;
    }
    EXPECT_LE(prev, oracle::pi(f, m, 4.0, 1.0, -0.2) + 1e-15);
  }
}

TEST(PiCount, DefaultTruncationMatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& f : {ResponseFamily::poisson(), ResponseFamily::negative_binomial(2.5)}) {
    for (const auto& key : SelectionMechanism::catalog_keys()) {
      if (key == "expn-mgf") continue;
      for (int rep = 0; rep < 10; ++rep) {
        const auto m = SelectionMechanism::from_key(key, u(rng) - 0.5);
        const double mu = 0.3 + 8 * u(rng), tau = 2 * u(rng) - 1;
        const auto r = selmod::selection_probability(m, f, mu, 1.0, tau);
        EXPECT_NEAR(r.pi, oracle::pi(f, m, mu, 1.0, tau), 1e-10) << f.name() << " " << key;
        EXPECT_LT(r.tail_mass, 1e-10);
      }
    }
  }
}

TEST(PiMgf, Examples) {
  const auto f = ResponseFamily::poisson();
  EXPECT_NEAR(selmod::pi_mgf(SelectionMechanism::from_key("expn-mgf", 0.0), f, 2.0, 1.0, 0.0).pi, kE1, 1e-15);
  // eta = alpha/mu = 1
  const double expected = 1.0 - std::exp(-1.0 + (std::exp(-1.0) - 1.0));
  EXPECT_NEAR(selmod::pi_mgf(SelectionMechanism::from_key("expn-mgf", 1.0), f, 1.0, 1.0, 0.0).pi, expected, 1e-15);
  EXPECT_NEAR(expected, 0.80449, 5e-6);
  const auto b = ResponseFamily::bernoulli();
  const double eta = 0.7 / 0.4;
  EXPECT_NEAR(selmod::pi_mgf(SelectionMechanism::from_key("expn-mgf", 0.7), b, 0.4, 1.0, 0.2).pi,
              1.0 - std::exp(-std::exp(0.2)) * (1.0 + 0.4 * (std::exp(-eta) - 1.0)), 1e-15);
}

TEST(PiMgf, RejectsNegativeAlpha) {
  EXPECT_THROW(selmod::pi_mgf(SelectionMechanism::from_key("expn-mgf", -0.1), ResponseFamily::poisson(), 1.0, 1.0, 0.0),
               selmod::DomainError);
}

TEST(PiMgf, AgreesWithSeriesAndBinarySums) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = SelectionMechanism::from_key("expn-mgf", 2.0 * u(rng));
    const double mu = 0.2 + 6 * u(rng), tau = 2 * u(rng) - 1;
    for (const auto& f : {ResponseFamily::poisson(), ResponseFamily::negative_binomial(0.5 + 3 * u(rng))}) {
      const auto closed = selmod::pi_mgf(m, f, mu, 1.0, tau);
      const auto series = selmod::pi_count(m, f, mu, tau, selmod::default_truncation(f, mu, 200.0));
      EXPECT_NEAR(closed.pi, series.pi, 1e-10);
      EXPECT_NEAR(closed.d_mu, series.d_mu, 1e-9);
      EXPECT_NEAR(closed.d_mumu, series.d_mumu, 1e-8);
      EXPECT_NEAR(closed.d_mutau, series.d_mutau, 1e-9);
    }
    const double p = 0.05 + 0.9 * u(rng);
    EXPECT_NEAR(selmod::pi_mgf(m, ResponseFamily::bernoulli(), p, 1.0, tau).pi,
                selmod::pi_binary(m, p, tau).pi, 1e-14);
  }
}

TEST(PiNormal, Examples) {
  const auto f = ResponseFamily::normal();
  for (double tau : {-1.3, 0.0, 0.4, 2.0}) {
    EXPECT_NEAR(selmod::pi_normal(SelectionMechanism::from_key("probit-linear", 0.0), 0.7, 2.0, tau).pi,
                oracle::Phi(tau), 1e-10);
  }
  // tau sqrt(1+a^2) + a (y - mu)/sigma keeps Pr{D=1} = Phi(tau)
  for (double sigma : {0.5, 1.0, 3.0}) {
    const auto [mech, tau_lin] = selmod::esn_mechanism(1.2, sigma, 0.8 / std::sqrt(1 + 0.64), 0.3);
    EXPECT_NEAR(selmod::pi_normal(mech, 1.2, sigma * sigma, tau_lin).pi, oracle::Phi(0.3), 1e-10);
    const auto [mech0, tau0] = selmod::esn_mechanism(-0.4, sigma, -0.7, 0.0);
    EXPECT_NEAR(selmod::pi_normal(mech0, -0.4, sigma * sigma, tau0).pi, 0.5, 1e-10);
  }
}

TEST(PiNormal, ProbitLinearClosedForm) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double alpha = 2 * u(rng), mu = 3 * u(rng), psi = 1.5 + u(rng), tau = u(rng);
    const double closed = oracle::Phi((tau + alpha * mu) / std::sqrt(1 + alpha * alpha * psi));
    EXPECT_NEAR(selmod::pi_normal(SelectionMechanism::from_key("probit-linear", alpha), mu, psi, tau).pi, closed, 1e-10);
  }
}

TEST(PiNormal, OtherLinearMechanismsAgainstSimpson) {
  const auto f = ResponseFamily::normal();
  for (const char* key : {"logit-linear", "gumbel-linear"}) {
    const auto m = SelectionMechanism::from_key(key, 0.6);
    EXPECT_NEAR(selmod::pi_normal(m, 0.5, 1.3, -0.2).pi, oracle::pi(f, m, 0.5, 1.3, -0.2), 1e-10) << key;
  }
}

TEST(PiNormal, RejectsStandardizedMechanisms) {
  EXPECT_THROW(selmod::pi_normal(SelectionMechanism::from_key("probit-std", 0.5), 1.0, 1.0, 0.0), selmod::DomainError);
}

class PiDerivatives : public ::testing::TestWithParam<oracle::Pair> {};

TEST_P(PiDerivatives, MatchFiniteDifferences) {
  const auto f = oracle::family_from(GetParam().family);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool normal = f.kind() == selmod::FamilyKind::Normal;
  for (int rep = 0; rep < 8; ++rep) {
    const bool mgf = GetParam().mechanism == "expn-mgf";
    const auto m = SelectionMechanism::from_key(GetParam().mechanism, mgf ? 0.2 + u(rng) : 1.4 * u(rng) - 0.7);
    const double mu = f.kind() == selmod::FamilyKind::Bernoulli ? 0.15 + 0.7 * u(rng) : (normal ? 2 * u(rng) - 1 : 0.5 + 4 * u(rng));
    const double tau = u(rng) - 0.5;
    const double psi = normal ? 0.6 + u(rng) : 1.0;
    auto at = [&](double m_, double t_, double p_) {
      return selmod::selection_probability(m, f, m_, p_, t_, selmod::TruncationPolicy{80, 0.0});
    };
    const auto c = at(mu, tau, psi);
    const double hm = 1e-6 * std::max(1.0, std::fabs(mu)), ht = 1e-6, hp = 1e-6 * std::max(1.0, psi);
    const auto mp = at(mu + hm, tau, psi), mm = at(mu - hm, tau, psi);
    const auto tp = at(mu, tau + ht, psi), tm = at(mu, tau - ht, psi);
    const double tol = 1e-5, fl = 1e-3;
    EXPECT_LT(oracle::rel_err(c.d_mu, (mp.pi - mm.pi) / (2 * hm), fl), tol);
    EXPECT_LT(oracle::rel_err(c.d_tau, (tp.pi - tm.pi) / (2 * ht), fl), tol);
    EXPECT_LT(oracle::rel_err(c.d_mumu, (mp.d_mu - mm.d_mu) / (2 * hm), fl), tol);
    EXPECT_LT(oracle::rel_err(c.d_tautau, (tp.d_tau - tm.d_tau) / (2 * ht), fl), tol);
    EXPECT_LT(oracle::rel_err(c.d_mutau, (tp.d_mu - tm.d_mu) / (2 * ht), fl), tol);
    if (normal) {
      const auto pp = at(mu, tau, psi + hp), pm = at(mu, tau, psi - hp);
      EXPECT_LT(oracle::rel_err(c.d_psi, (pp.pi - pm.pi) / (2 * hp), fl), tol);
      EXPECT_LT(oracle::rel_err(c.d_psipsi, (pp.d_psi - pm.d_psi) / (2 * hp), fl), tol);
      EXPECT_LT(oracle::rel_err(c.d_psimu, (pp.d_mu - pm.d_mu) / (2 * hp), fl), tol);
      EXPECT_LT(oracle::rel_err(c.d_psitau, (pp.d_tau - pm.d_tau) / (2 * hp), fl), tol);
    } else {
      EXPECT_EQ(c.d_psi, 0.0);
      EXPECT_EQ(c.d_psipsi, 0.0);
      EXPECT_EQ(c.d_psimu, 0.0);
      EXPECT_EQ(c.d_psitau, 0.0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllPairs, PiDerivatives, ::testing::ValuesIn(oracle::valid_pairs()),
                         [](const auto& info) {
                           std::string s = info.param.family + "_" + info.param.mechanism;
                           for (auto& ch : s) {
                             if (ch == '-') ch = '_';
                           }
                           return s;
                         });

TEST(Quadrature, KnownIntegrals) {
  const auto r = selmod::quadrature::integrate<3>(
      [](double x) { return std::array<double, 3>{std::exp(-x * x), x * x, std::sin(x)}; }, -6.0, 6.0, 1e-13);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value[0], std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(r.value[1], 144.0, 1e-10);
  EXPECT_NEAR(r.value[2], 0.0, 1e-13);
}
