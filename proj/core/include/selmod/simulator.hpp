#pragma once

// Synthetic data from the latent representation: draw Y ~ f and an
// independent T ~ G0, and keep y exactly when T <= h(y).

#include "selmod/dataset.hpp"
#include "selmod/response_family.hpp"
#include "selmod/selection_mechanism.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace selmod {

enum class CovariateLaw { StandardNormalColumns, UserMatrix };

struct SimConfig {
  Eigen::Index n = 0;
  ResponseFamily family = ResponseFamily::poisson();
  SelectionMechanism mechanism = SelectionMechanism::from_key("probit-linear");
  Eigen::VectorXd beta_true;
  Eigen::VectorXd gamma_true;
  double alpha_true = 0.0;
  double psi_true = 1.0;  // used by the normal family only
  // StandardNormalColumns: an intercept followed by iid N(0,1) columns, so
  // X has beta_true.size() columns. UserMatrix: X and W below are used as is.
  CovariateLaw covariate_law = CovariateLaw::StandardNormalColumns;
  Eigen::MatrixXd X;
  Eigen::MatrixXd W;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  // Throws std::invalid_argument on dimension or domain problems.
  void validate() const;
};

struct SimOutput {
  Dataset data;
  Eigen::VectorXd y_latent;  // response before censoring
  Eigen::VectorXd mu;
  Eigen::VectorXd tau;
};

Dataset simulate(const SimConfig& config);
// Keeps the latent responses alongside the censored dataset.
SimOutput simulate_full(const SimConfig& config);

// Independent stream for observation i; identical for any worker count.
std::mt19937_64 observation_stream(std::uint64_t seed, std::uint64_t i);
// Uniform on the open interval (0, 1).
double open_uniform(std::mt19937_64& rng);

// Inverse-CDF draws.
double draw_response(const ResponseFamily& family, double mu, double psi, double u);
double draw_g0(G0Kind g0, double u);

struct MonteCarloEstimate {
  double estimate;
  double std_error;
};

// Pr{D = 1} for one covariate row by brute-force simulation; reps >= 1e4.
MonteCarloEstimate pi_monte_carlo(const ResponseFamily& family, const SelectionMechanism& mech, double mu,
                                  double psi, double tau, long reps, std::uint64_t seed);

struct EsnCheck {
  double max_deviation;  // sup over the grid of |general - closed form|
  double pi;             // normalizer from the general machinery
  double pi_closed;      // Phi(tau)
};

// Compares the normal-response, normal-G0 conditional density built from the
// general machinery with the closed-form extended skew-normal density
//   phi(z)/sigma * Phi(tau*sqrt(1+a^2) + a*z) / Phi(tau),  z = (y-mu)/sigma,
// where a = rho / sqrt(1 - rho^2).
EsnCheck esn_density_check(double mu, double sigma, double rho, double tau, const std::vector<double>& y_grid);

// The linear mechanism equivalent to the extended skew-normal parametrization.
struct EsnMechanism {
  SelectionMechanism mechanism;
  double tau;
};
EsnMechanism esn_mechanism(double mu, double sigma, double rho, double tau);

}  // namespace selmod
