#include "selmod/dataset.hpp"

#include "selmod/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selmod {

double Dataset::max_observed_y() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (selected(i)) m = std::fmax(m, y[i]);
  }
  return m;
}

void Dataset::validate() const {
  const Eigen::Index rows = n();
  if (y.size() != rows || X.rows() != rows || W.rows() != rows) {
    throw SchemaError("dataset components have inconsistent row counts");
  }
  if (X.cols() == 0 || W.cols() == 0) throw SchemaError("design matrices must have at least one column");
  if (!x_names.empty() && static_cast<Eigen::Index>(x_names.size()) != X.cols()) {
    throw SchemaError("x_names does not match the number of response covariates");
  }
  if (!w_names.empty() && static_cast<Eigen::Index>(w_names.size()) != W.cols()) {
    throw SchemaError("w_names does not match the number of selection covariates");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = static_cast<std::size_t>(i + 1);
    if (d[i] != 0 && d[i] != 1) throw SchemaError("selection indicator must be 0 or 1", row, "d");
    if (d[i] == 1 && !std::isfinite(y[i])) throw SchemaError("selected row has no response value", row, "y");
    if (d[i] == 0 && !std::isnan(y[i])) throw SchemaError("unselected row carries a response value", row, "y");
    if (!X.row(i).allFinite()) throw SchemaError("non-finite response covariate", row, "X");
    if (!W.row(i).allFinite()) throw SchemaError("non-finite selection covariate", row, "W");
  }
}

Dataset Dataset::rows(const std::vector<Eigen::Index>& index) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(index.size());
  out.d.resize(m);
  out.y.resize(m);
  out.X.resize(m, X.cols());
  out.W.resize(m, W.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index i = index[static_cast<std::size_t>(k)];
    if (i < 0 || i >= n()) throw std::out_of_range("row index out of range");
    out.d[k] = d[i];
    out.y[k] = y[i];
    out.X.row(k) = X.row(i);
    out.W.row(k) = W.row(i);
  }
  out.x_names = x_names;
  out.w_names = w_names;
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  if (n() != other.n() || p() != other.p() || q() != other.q()) return false;
  if (d != other.d || X != other.X || W != other.W) return false;
  if (x_names != other.x_names || w_names != other.w_names) return false;
  for (Eigen::Index i = 0; i < n(); ++i) {
    const bool a = std::isnan(y[i]);
    const bool b = std::isnan(other.y[i]);
    if (a != b || (!a && y[i] != other.y[i])) return false;
  }
  return true;
}

Eigen::VectorXd ParamVector::theta() const {
  Eigen::VectorXd t(theta_size());
  t.head(beta.size()) = beta;
  t.segment(beta.size(), gamma.size()) = gamma;
  if (psi) t[t.size() - 1] = *psi;
  return t;
}

void ParamVector::set_theta(const Eigen::VectorXd& theta) {
  if (theta.size() != theta_size()) throw std::invalid_argument("theta has the wrong length");
  beta = theta.head(beta.size());
  gamma = theta.segment(beta.size(), gamma.size());
  if (psi) psi = theta[theta.size() - 1];
}

}  // namespace selmod
