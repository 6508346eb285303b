#pragma once

// Plain GLM fits used to initialize theta at alpha = 0, where the response
// model and the selection model decouple.

#include "selmod/response_family.hpp"
#include "selmod/selection_mechanism.hpp"

#include <Eigen/Dense>

namespace selmod {

struct GlmFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd std_err;  // from the expected information at coef
  double dispersion = 1.0;  // ML estimate of psi for the normal family, else 1
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  // max |score_j| / n at the returned coefficients
  double score_norm = 0.0;
};

struct IrlsOptions {
  int max_iter = 100;
  double tol = 1e-8;
  int max_halvings = 30;
  // Coefficients beyond this size are taken as separation.
  double divergence = 1e6;
};

// Fisher scoring with step halving on the log-likelihood. Throws
// RankDeficientError when X lacks full column rank and SupportError when y
// leaves the family support; separation comes back as converged = false.
GlmFit fit_glm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const ResponseFamily& family,
               const IrlsOptions& options = {});

// Binary GLM of d on W whose inverse link is the alpha = 0 selection
// probability: probit for a normal G0, logit for logistic, cloglog for the
// exponential mechanisms.
GlmFit fit_selection_glm(const Eigen::VectorXd& d, const Eigen::MatrixXd& W, G0Kind g0,
                         const IrlsOptions& options = {});

Link selection_link(G0Kind g0);

}  // namespace selmod
