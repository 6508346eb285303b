#include "selmod/simulator.hpp"

#include "selmod/normalizer.hpp"
#include "selmod/special.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace selmod {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Smallest k with F(k) >= u, walking the pmf recurrence in log space so that
// large means do not underflow p_0.
double count_quantile(double log_p0, double u, auto&& log_ratio) {
  double log_p = log_p0;
  double cdf = std::exp(log_p);
  long k = 0;
  while (cdf < u) {
    const double r = log_ratio(k);
    log_p += r;
    ++k;
    cdf += std::exp(log_p);
    // Past the mode with no representable mass left; u was within rounding of 1.
    if (r < 0.0 && log_p < -800.0) break;
  }
  return static_cast<double>(k);
}

}  // namespace

void SimConfig::validate() const {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (beta_true.size() == 0 || gamma_true.size() == 0) {
    throw std::invalid_argument("beta_true and gamma_true need at least one entry");
  }
  if (covariate_law == CovariateLaw::UserMatrix) {
    if (X.rows() != n || W.rows() != n) throw std::invalid_argument("user covariate matrices must have n rows");
    if (X.cols() != beta_true.size()) throw std::invalid_argument("X columns do not match beta_true");
    if (W.cols() != gamma_true.size()) throw std::invalid_argument("W columns do not match gamma_true");
  }
  if (!family.dispersion_known() && !(psi_true > 0.0)) throw std::invalid_argument("psi_true must be positive");
  if (mechanism.requires_nonnegative_alpha() && alpha_true < 0.0) {
    throw std::invalid_argument("mechanism '" + mechanism.key() + "' requires alpha >= 0");
  }
  if (mechanism.requires_nonnegative_support() && !family.nonnegative_support()) {
    throw std::invalid_argument("mechanism '" + mechanism.key() + "' requires nonnegative responses");
  }
  if (mechanism.requires_positive_mean() && family.kind() == FamilyKind::Normal) {
    throw std::invalid_argument("mechanism '" + mechanism.key() + "' cannot be used with the normal family");
  }
}

std::mt19937_64 observation_stream(std::uint64_t seed, std::uint64_t i) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(i)));
}

double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_response(const ResponseFamily& family, double mu, double psi, double u) {
  switch (family.kind()) {
    case FamilyKind::Bernoulli:
      return u > 1.0 - mu ? 1.0 : 0.0;
    case FamilyKind::Poisson:
      return count_quantile(-mu, u, [mu](long k) { return std::log(mu) - std::log(static_cast<double>(k + 1)); });
    case FamilyKind::NegativeBinomial: {
      const double kappa = family.kappa();
      const double log_q = std::log(mu / (mu + kappa));
      return count_quantile(kappa * std::log(kappa / (kappa + mu)), u, [=](long k) {
        return std::log((static_cast<double>(k) + kappa) / static_cast<double>(k + 1)) + log_q;
      });
    }
    case FamilyKind::Normal:
      return mu + std::sqrt(psi) * special::norm_quantile(u);
  }
  throw std::logic_error("unhandled family");
}

double draw_g0(G0Kind g0, double u) {
  switch (g0) {
    case G0Kind::StdNormal: return special::norm_quantile(u);
    case G0Kind::Logistic: return std::log(u) - std::log1p(-u);
    case G0Kind::UnitExponential: return -std::log1p(-u);
  }
  throw std::logic_error("unhandled G0");
}

SimOutput simulate_full(const SimConfig& config) {
  config.validate();
  const Eigen::Index n = config.n;
  const Eigen::Index p = config.beta_true.size();
  const Eigen::Index q = config.gamma_true.size();
  const SelectionMechanism mech = config.mechanism.with_alpha(config.alpha_true);
  const double psi = config.family.dispersion_known() ? 1.0 : config.psi_true;
  const bool user = config.covariate_law == CovariateLaw::UserMatrix;

  SimOutput out;
  Dataset& data = out.data;
  data.d.resize(n);
  data.y.resize(n);
  data.X = user ? config.X : Eigen::MatrixXd(n, p);
  data.W = user ? config.W : Eigen::MatrixXd(n, q);
  out.y_latent.resize(n);
  out.mu.resize(n);
  out.tau.resize(n);

  data.x_names = {"(Intercept)"};
  data.w_names = {"(Intercept)"};
  for (Eigen::Index j = 1; j < p; ++j) data.x_names.push_back("x" + std::to_string(j));
  for (Eigen::Index j = 1; j < q; ++j) data.w_names.push_back("w" + std::to_string(j));

  auto row = [&](Eigen::Index i) {
    std::mt19937_64 rng = observation_stream(config.seed, static_cast<std::uint64_t>(i));
    if (!user) {
      data.X(i, 0) = 1.0;
      for (Eigen::Index j = 1; j < p; ++j) data.X(i, j) = special::norm_quantile(open_uniform(rng));
      data.W(i, 0) = 1.0;
      for (Eigen::Index j = 1; j < q; ++j) data.W(i, j) = special::norm_quantile(open_uniform(rng));
    }
    const double mu = config.family.mean_from_eta(data.X.row(i).dot(config.beta_true));
    const double tau = data.W.row(i).dot(config.gamma_true);
    const double y = draw_response(config.family, mu, psi, open_uniform(rng));
    const double t = draw_g0(mech.g0_kind(), open_uniform(rng));
    const bool keep = t <= mech.h_eval(y, tau, mu).h;
    out.mu[i] = mu;
    out.tau[i] = tau;
    out.y_latent[i] = y;
    data.d[i] = keep ? 1 : 0;
    data.y[i] = keep ? y : std::numeric_limits<double>::quiet_NaN();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(std::max<Eigen::Index>(n, 1))));
  std::vector<std::exception_ptr> errors(workers);
  auto block = [&](unsigned w) {
    try {
      for (Eigen::Index i = n * w / workers; i < n * (w + 1) / workers; ++i) row(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(block, w);
    block(0);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Dataset simulate(const SimConfig& config) { return simulate_full(config).data; }

MonteCarloEstimate pi_monte_carlo(const ResponseFamily& family, const SelectionMechanism& mech, double mu,
                                  double psi, double tau, long reps, std::uint64_t seed) {
  if (reps < 10000) throw std::invalid_argument("pi_monte_carlo needs at least 1e4 replicates");
  std::mt19937_64 rng(splitmix64(seed));
  long hits = 0;
  for (long r = 0; r < reps; ++r) {
    const double y = draw_response(family, mu, psi, open_uniform(rng));
    const double t = draw_g0(mech.g0_kind(), open_uniform(rng));
    if (t <= mech.h_eval(y, tau, mu).h) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps))};
}

EsnMechanism esn_mechanism(double mu, double sigma, double rho, double tau) {
  if (!(std::fabs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double a = rho / std::sqrt(1.0 - rho * rho);
  // tau*sqrt(1+a^2) + a*(y-mu)/sigma written as tau' + alpha'*y.
  return {SelectionMechanism(G0Kind::StdNormal, HKind::Linear, a / sigma),
          tau * std::sqrt(1.0 + a * a) - a * mu / sigma};
}

EsnCheck esn_density_check(double mu, double sigma, double rho, double tau, const std::vector<double>& y_grid) {
  const auto [mech, tau_lin] = esn_mechanism(mu, sigma, rho, tau);
  const ResponseFamily family = ResponseFamily::normal();
  const double psi = sigma * sigma;
  const double a = rho / std::sqrt(1.0 - rho * rho);

  EsnCheck out{0.0, pi_normal(mech, mu, psi, tau_lin).pi, special::norm_cdf(tau)};
  for (double y : y_grid) {
    const double general = std::exp(family.log_pf(y, mu, psi)) * mech.G_eval(y, tau_lin, mu) / out.pi;
    const double z = (y - mu) / sigma;
    const double closed =
        special::norm_pdf(z) / sigma * special::norm_cdf(tau * std::sqrt(1.0 + a * a) + a * z) / out.pi_closed;
    out.max_deviation = std::max(out.max_deviation, std::fabs(general - closed));
  }
  return out;
}

}  // namespace selmod
