#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace selmod {

// Observations (d_i, y_i, x_i, w_i); y_i is NaN exactly when d_i = 0.
struct Dataset {
  Eigen::VectorXi d;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // response covariates, intercept included
  Eigen::MatrixXd W;  // selection covariates, intercept included
  std::vector<std::string> x_names;
  std::vector<std::string> w_names;

  Eigen::Index n() const noexcept { return d.size(); }
  Eigen::Index p() const noexcept { return X.cols(); }
  Eigen::Index q() const noexcept { return W.cols(); }
  Eigen::Index n_selected() const noexcept { return d.sum(); }
  bool selected(Eigen::Index i) const noexcept { return d[i] == 1; }

  // Largest observed response, 0 when nothing is observed.
  double max_observed_y() const;

  // Throws SchemaError on shape mismatches, non-binary d, a missing response
  // on a selected row, a present response on an unselected row, or
  // non-finite covariates.
  void validate() const;

  Dataset rows(const std::vector<Eigen::Index>& index) const;

  bool operator==(const Dataset& other) const;
};

// alpha, theta = (beta', gamma')' and psi when the dispersion is unknown.
struct ParamVector {
  double alpha = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  std::optional<double> psi;

  Eigen::Index theta_size() const noexcept { return beta.size() + gamma.size() + (psi ? 1 : 0); }
  Eigen::VectorXd theta() const;
  void set_theta(const Eigen::VectorXd& theta);
};

}  // namespace selmod
