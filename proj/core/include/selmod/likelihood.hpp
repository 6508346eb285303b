#pragma once

// Full-sample log-likelihood
//
//   log L = sum_{d=1} log{ f(y_i) G(y_i) } + sum_{d=0} log(1 - pi_i)
//
// with its analytic score and Hessian in theta = (beta, gamma[, psi]) at a
// fixed alpha. Infeasible points (pi_i = 1 on an unselected row, f(y_i) = 0 or
// a mean outside its domain) give loglik = -infinity rather than an exception.

#include "selmod/dataset.hpp"
#include "selmod/normalizer.hpp"
#include "selmod/response_family.hpp"
#include "selmod/selection_mechanism.hpp"

#include <Eigen/Dense>

#include <optional>

namespace selmod {

struct Model {
  ResponseFamily family;
  // Only the kinds are used; alpha comes from ParamVector.
  SelectionMechanism mechanism;
  std::optional<int> truncation_K;

  // Throws std::invalid_argument when the mechanism cannot be combined with
  // the family (MGF-linear needs nonnegative support, standardized h needs a
  // positive mean).
  void validate() const;
};

struct ScoreHessian {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd hessian;
  // Unselected rows whose truncated series left tail mass above 1e-10.
  int tail_warnings = 0;

  bool feasible() const noexcept;
};

struct EvalOptions {
  // Observations are split into contiguous blocks, one per worker.
  unsigned threads = 1;
};

double loglik(const Dataset& data, const Model& model, const ParamVector& params,
              const EvalOptions& options = {});
ScoreHessian score(const Dataset& data, const Model& model, const ParamVector& params,
                   const EvalOptions& options = {});
ScoreHessian hessian(const Dataset& data, const Model& model, const ParamVector& params,
                     const EvalOptions& options = {});

// Starting parameter layout for a model: zero coefficients, psi = 1 when the
// family has unknown dispersion.
ParamVector make_params(const Dataset& data, const Model& model, double alpha = 0.0);

}  // namespace selmod
