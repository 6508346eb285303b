#include "selmod/normalizer.hpp"
#include "selmod/simulator.hpp"
#include "selmod/special.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using selmod::ResponseFamily;
using selmod::SelectionMechanism;
using selmod::SimConfig;

namespace {

SimConfig config(const std::string& family, const std::string& mech, double alpha, int n, std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.family = oracle::family_from(family);
  c.mechanism = SelectionMechanism::from_key(mech);
  c.alpha_true = alpha;
  c.beta_true = Eigen::Vector2d(family == "normal" ? 1.0 : 0.5, 0.4);
  c.gamma_true = Eigen::Vector2d(0.1, 0.6);
  c.psi_true = 1.3;
  c.seed = seed;
  return c;
}

bool identical(const selmod::Dataset& a, const selmod::Dataset& b) {
  if (a.n() != b.n() || a.d != b.d || a.X != b.X || a.W != b.W) return false;
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    if (std::isnan(a.y[i]) != std::isnan(b.y[i])) return false;
    if (!std::isnan(a.y[i]) && a.y[i] != b.y[i]) return false;
  }
  return true;
}

}  // namespace

TEST(Simulate, SameSeedIsBitIdentical) {
  const auto c = config("negbin", "gumbel-std", 0.4, 500, 99);
  EXPECT_TRUE(identical(selmod::simulate(c), selmod::simulate(c)));
  auto other = c;
  other.seed = 100;
  EXPECT_FALSE(identical(selmod::simulate(c), selmod::simulate(other)));
}

TEST(Simulate, IndependentOfWorkerCount) {
  auto c = config("normal", "logit-linear", -0.3, 701, 5);
  const auto one = selmod::simulate(c);
  for (unsigned t : {2u, 3u, 8u}) {
    c.threads = t;
    EXPECT_TRUE(identical(one, selmod::simulate(c))) << t;
  }
}

TEST(Simulate, DimensionsAndNames) {
  auto c = config("poisson", "probit-linear", 0.0, 10, 1);
  c.beta_true = Eigen::Vector3d(0.1, 0.2, 0.3);
  const auto d = selmod::simulate(c);
  EXPECT_EQ(d.X.cols(), 3);
  EXPECT_EQ(d.W.cols(), 2);
  EXPECT_EQ(d.x_names, (std::vector<std::string>{"(Intercept)", "x1", "x2"}));
  EXPECT_EQ(d.w_names, (std::vector<std::string>{"(Intercept)", "w1"}));
  EXPECT_TRUE((d.X.col(0).array() == 1.0).all());
  c.n = 0;
  EXPECT_EQ(selmod::simulate(c).n(), 0);
}

TEST(Simulate, UserMatrices) {
  auto c = config("bernoulli", "probit-linear", 0.5, 4, 3);
  c.covariate_law = selmod::CovariateLaw::UserMatrix;
  c.X = Eigen::MatrixXd::Ones(4, 2);
  c.W = Eigen::MatrixXd::Ones(4, 2);
  EXPECT_EQ(selmod::simulate(c).X, c.X);
  c.W = Eigen::MatrixXd::Ones(3, 2);
  EXPECT_THROW(selmod::simulate(c), std::invalid_argument);
}

TEST(Simulate, RejectsInvalidConfigs) {
  EXPECT_THROW(selmod::simulate(config("poisson", "expn-mgf", -0.1, 5, 1)), std::invalid_argument);
  EXPECT_THROW(selmod::simulate(config("normal", "expn-mgf", 0.1, 5, 1)), std::invalid_argument);
  auto c = config("normal", "probit-linear", 0.1, 5, 1);
  c.psi_true = 0.0;
  EXPECT_THROW(selmod::simulate(c), std::invalid_argument);
}

TEST(Simulate, SelectionRateMatchesNormalizer) {
  for (const auto& [fam, mech] : std::vector<std::pair<std::string, std::string>>{
           {"poisson", "probit-std"}, {"bernoulli", "gumbel-linear"}, {"negbin", "expn-mgf"}, {"normal", "logit-linear"}}) {
    const auto c = config(fam, mech, 0.6, 20000, 17);
    const auto d = selmod::simulate(c);
    double sum_pi = 0, var = 0;
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      const double mu = c.family.mean_from_eta(d.X.row(i).dot(c.beta_true));
      const double pi = selmod::selection_probability(c.mechanism.with_alpha(c.alpha_true), c.family, mu, c.psi_true,
                                                      d.W.row(i).dot(c.gamma_true))
                            .pi;
      sum_pi += pi;
      var += pi * (1 - pi);
    }
    const double n = static_cast<double>(d.n());
    EXPECT_LT(std::fabs(d.d.cast<double>().mean() - sum_pi / n), 4.0 * std::sqrt(var) / n) << fam << " " << mech;
  }
}

TEST(Simulate, ConditionalAcceptanceFollowsG) {
  for (const auto& key : SelectionMechanism::catalog_keys()) {
    const auto c = config("poisson", key, 0.5, 100000, 23);
    const auto out = selmod::simulate_full(c);
    const auto mech = c.mechanism.with_alpha(c.alpha_true);
    std::map<double, std::array<double, 3>> bins;  // count of d, sum G, sum G(1-G)
    for (Eigen::Index i = 0; i < out.data.n(); ++i) {
      const double g = mech.G_eval(out.y_latent[i], out.tau[i], out.mu[i]);
      auto& b = bins[out.y_latent[i]];
      b[0] += out.data.d[i];
      b[1] += g;
      b[2] += g * (1 - g);
    }
    int tested = 0;
    for (const auto& [y, b] : bins) {
      if (b[2] < 25.0) continue;
      ++tested;
      EXPECT_LT(std::fabs(b[0] - b[1]), 4.0 * std::sqrt(b[2])) << key << " y=" << y;
    }
    EXPECT_GE(tested, 3) << key;
  }
}

TEST(Simulate, NoDependenceAtAlphaZero) {
  const auto out = selmod::simulate_full(config("normal", "probit-linear", 0.0, 20000, 31));
  // Residual of y given x against d; both are independent given covariates.
  const Eigen::ArrayXd r = (out.y_latent - out.mu).array();
  const Eigen::ArrayXd d = out.data.d.cast<double>().array();
  const double n = static_cast<double>(r.size());
  const double cov = ((r - r.mean()) * (d - d.mean())).sum() / n;
  const double corr = cov / std::sqrt((r - r.mean()).square().mean() * (d - d.mean()).square().mean());
  EXPECT_LT(std::fabs(corr), 4.0 / std::sqrt(n));
}

TEST(PiMonteCarlo, BinaryExample) {
  const auto m = selmod::pi_monte_carlo(ResponseFamily::bernoulli(), SelectionMechanism::from_key("probit-linear").with_alpha(1.0),
                                        0.5, 1.0, 0.0, 1000000, 4);
  EXPECT_NEAR(m.estimate, 0.6707, 0.0005);
  const double exact = selmod::pi_binary(SelectionMechanism::from_key("probit-linear").with_alpha(1.0), 0.5, 0.0).pi;
  EXPECT_NEAR(exact, 0.5 * (0.5 + selmod::special::norm_cdf(1.0)), 1e-15);
  EXPECT_LT(std::fabs(m.estimate - exact), 4.0 * m.std_error);
}

TEST(PiMonteCarlo, GumbelPoissonAgainstSeries) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int r = 0; r < 5; ++r) {
    const double mu = 0.5 + 4 * u(rng), tau = -1 + 2 * u(rng), alpha = -0.5 + u(rng);
    const auto mech = SelectionMechanism::from_key("gumbel-linear").with_alpha(alpha);
    const auto fam = ResponseFamily::poisson();
    const auto m = selmod::pi_monte_carlo(fam, mech, mu, 1.0, tau, 200000, 100 + r);
    const double exact = selmod::pi_count(mech, fam, mu, tau, selmod::default_truncation(fam, mu, 0)).pi;
    EXPECT_LT(std::fabs(m.estimate - exact), 4.0 * m.std_error) << r;
  }
}

TEST(PiMonteCarlo, HalfAtZero) {
  const auto m = selmod::pi_monte_carlo(ResponseFamily::normal(), SelectionMechanism::from_key("probit-linear"), 0.7,
                                        2.0, 0.0, 100000, 6);
  EXPECT_LT(std::fabs(m.estimate - 0.5), 4.0 * m.std_error);
  EXPECT_THROW(selmod::pi_monte_carlo(ResponseFamily::normal(), SelectionMechanism::from_key("probit-linear"), 0.7, 2.0,
                                      0.0, 100, 6),
               std::invalid_argument);
}

TEST(Esn, NoDependenceIsPlainNormal) {
  const auto [mech, tau] = selmod::esn_mechanism(1.0, 2.0, 0.0, 0.4);
  EXPECT_EQ(mech.alpha(), 0.0);
  EXPECT_EQ(tau, 0.4);
  std::vector<double> grid;
  for (int i = -60; i <= 60; ++i) grid.push_back(1.0 + 0.2 * i);
  const auto chk = selmod::esn_density_check(1.0, 2.0, 0.0, 0.4, grid);
  EXPECT_LT(chk.max_deviation, 1e-12);
}

TEST(Esn, MatchesClosedForm) {
  const double mu = 0.5, sigma = 2.0, rho = 0.6, tau = 0.3;
  std::vector<double> grid;
  for (int i = -120; i <= 120; ++i) grid.push_back(mu + sigma * 0.05 * i);
  const auto chk = selmod::esn_density_check(mu, sigma, rho, tau, grid);
  EXPECT_LT(chk.max_deviation, 1e-8);
  EXPECT_NEAR(chk.pi, selmod::special::norm_cdf(tau), 1e-8);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int r = 0; r < 20; ++r) {
    const double m = -2 + 4 * u(rng), s = 0.3 + 2.5 * u(rng), p = -0.95 + 1.9 * u(rng), t = -1.5 + 3 * u(rng);
    std::vector<double> g;
    for (int i = -60; i <= 60; ++i) g.push_back(m + s * 0.1 * i);
    const auto c = selmod::esn_density_check(m, s, p, t, g);
    EXPECT_LT(c.max_deviation, 1e-8) << r;
    EXPECT_NEAR(c.pi, c.pi_closed, 1e-6) << r;
  }
}

TEST(Esn, DensityIntegratesToOne) {
  const double mu = 0.5, sigma = 2.0, rho = 0.6, tau = 0.3;
  const auto [mech, tau_lin] = selmod::esn_mechanism(mu, sigma, rho, tau);
  const double pi = selmod::pi_normal(mech, mu, sigma * sigma, tau_lin).pi;
  const auto fam = ResponseFamily::normal();
  const double total = oracle::simpson(
      [&](double y) { return std::exp(fam.log_pf(y, mu, sigma * sigma)) * mech.G_eval(y, tau_lin, mu) / pi; },
      mu - 14 * sigma, mu + 14 * sigma, 40000);
  EXPECT_NEAR(total, 1.0, 1e-8);
}
