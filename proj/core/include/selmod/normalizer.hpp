#pragma once

// Selection probability pi = Pr{D=1} = E_Y[G0{h(Y)}] with its first and
// second partial derivatives in (mu, tau, psi).

#include "selmod/response_family.hpp"
#include "selmod/selection_mechanism.hpp"

#include <optional>

namespace selmod {

struct PiResult {
  double pi = 0.0;
  // 1 - pi, accumulated directly from survival terms.
  double one_minus_pi = 1.0;
  double d_mu = 0.0;
  double d_tau = 0.0;
  double d_psi = 0.0;
  double d_mumu = 0.0;
  double d_tautau = 0.0;
  double d_mutau = 0.0;
  double d_psimu = 0.0;
  double d_psitau = 0.0;
  double d_psipsi = 0.0;
  std::optional<int> truncation_K;
  // Probability mass of the response beyond truncation_K.
  double tail_mass = 0.0;
  bool tail_warning = false;
};

inline constexpr double kTailWarning = 1e-10;
inline constexpr double kQuadratureTolerance = 1e-10;

// pi = (1-mu) G(0) + mu G(1).
PiResult pi_binary(const SelectionMechanism& mech, double mu, double tau);

// Truncated series sum_{k<=K} p_k(mu) G(k) for Poisson and negative binomial.
PiResult pi_count(const SelectionMechanism& mech, const ResponseFamily& family, double mu, double tau,
                  int K);

// pi = 1 - exp(-e^tau) M(-alpha/mu) for the MGF-linear mechanism.
PiResult pi_mgf(const SelectionMechanism& mech, const ResponseFamily& family, double mu, double psi,
                double tau);

// Adaptive quadrature over mu +- 10 sigma for the normal family.
PiResult pi_normal(const SelectionMechanism& mech, double mu, double psi, double tau);

// K = max(max observed y, ceil(mu + 10 sd + 20)), pushed further out for
// negative binomial tails until a geometric bound on the remainder is below 1e-15.
int default_truncation(const ResponseFamily& family, double mu, double max_observed_y);

struct TruncationPolicy {
  std::optional<int> fixed_K;
  double max_observed_y = 0.0;
};

// Routes to the closed form, series or quadrature appropriate for the pair.
PiResult selection_probability(const SelectionMechanism& mech, const ResponseFamily& family, double mu,
                               double psi, double tau, const TruncationPolicy& truncation = {});

}  // namespace selmod
