#include "selmod/glm.hpp"

#include "selmod/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace selmod {

namespace {

double objective(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const ResponseFamily& family) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += family.log_pf(y[i], mu[i], 1.0);
  return s;
}

Eigen::VectorXd means(const Eigen::VectorXd& eta, const ResponseFamily& family) {
  Eigen::VectorXd mu(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = family.mean_from_eta(eta[i]);
  return mu;
}

}  // namespace

Link selection_link(G0Kind g0) {
  switch (g0) {
    case G0Kind::StdNormal: return Link::Probit;
    case G0Kind::Logistic: return Link::Logit;
    case G0Kind::UnitExponential: return Link::Cloglog;
  }
  throw std::logic_error("unhandled G0");
}

GlmFit fit_glm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const ResponseFamily& family,
               const IrlsOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw std::invalid_argument("response and design have different lengths");
  if (n == 0) throw std::invalid_argument("cannot fit a GLM without observations");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) throw RankDeficientError("design matrix is rank deficient");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!family.in_support(y[i])) throw SupportError("response value outside the support of " + family.name());
  }

  const Link link = family.link();
  const double ybar = y.mean();
  Eigen::VectorXd mu(n), eta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = family.clamp_mean(0.5 * (y[i] + ybar));
    eta[i] = link_derivs(link, mu[i]).value;
  }

  GlmFit fit;
  fit.coef = Eigen::VectorXd::Zero(p);
  double obj = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd w(n), z(n), u(n);
  bool first = true;

  auto working = [&](const Eigen::VectorXd& m, const Eigen::VectorXd& e) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double g1 = link_derivs(link, m[i]).d1;
      const double v = family.variance(m[i], 1.0);
      w[i] = 1.0 / (g1 * g1 * v);
      z[i] = e[i] + (y[i] - m[i]) * g1;
      u[i] = (y[i] - m[i]) / (v * g1);
    }
  };

  for (fit.iterations = 1; fit.iterations <= options.max_iter; ++fit.iterations) {
    working(mu, eta);
    const Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd target = xtwx.ldlt().solve(X.transpose() * (w.array() * z.array()).matrix());

    Eigen::VectorXd step = target - fit.coef;
    Eigen::VectorXd cand = target;
    Eigen::VectorXd cand_eta = X * cand;
    Eigen::VectorXd cand_mu = means(cand_eta, family);
    double cand_obj = objective(y, cand_mu, family);
    if (!first) {
      // Near the optimum the objective only moves at rounding level.
      const double slack = 1e-13 * std::max(1.0, std::fabs(obj));
      auto ascent = [&] { return cand_obj >= obj - slack; };
      for (int h = 0; h < options.max_halvings && !ascent(); ++h) {
        step *= 0.5;
        cand = fit.coef + step;
        cand_eta = X * cand;
        cand_mu = means(cand_eta, family);
        cand_obj = objective(y, cand_mu, family);
      }
      if (!ascent()) break;
    }
    first = false;
    const double change = std::fabs(cand_obj - obj);
    fit.coef = cand;
    eta = cand_eta;
    mu = cand_mu;
    obj = cand_obj;

    if (fit.coef.cwiseAbs().maxCoeff() > options.divergence) break;
    working(mu, eta);
    fit.score_norm = (X.transpose() * u).cwiseAbs().maxCoeff() / static_cast<double>(n);
    // Scoring converges quadratically, so iterate well past the tolerance.
    if (fit.score_norm < 1e-6 * options.tol) break;
    if (fit.score_norm < options.tol && step.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, fit.coef.cwiseAbs().maxCoeff())) break;
    if (change <= 1e-16 * std::fabs(obj) && fit.score_norm < options.tol) break;
  }
  if (fit.iterations > options.max_iter) fit.iterations = options.max_iter;

  working(mu, eta);
  fit.score_norm = (X.transpose() * u).cwiseAbs().maxCoeff() / static_cast<double>(n);
  fit.converged = fit.score_norm < options.tol && fit.coef.cwiseAbs().maxCoeff() <= options.divergence;
  if (family.kind() == FamilyKind::Bernoulli && fit.converged) {
    // Separation drives the working weights to zero along some direction of
    // the design, so X'WX degenerates relative to X'X.
    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(xtwx, xtx, Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success || ges.eigenvalues().minCoeff() < 1e-9) fit.converged = false;
  }

  if (family.kind() == FamilyKind::Normal) {
    fit.dispersion = (y - mu).squaredNorm() / static_cast<double>(n);
  }
  fit.loglik = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) fit.loglik += family.log_pf(y[i], mu[i], fit.dispersion);
  const Eigen::MatrixXd info = X.transpose() * w.asDiagonal() * X / fit.dispersion;
  fit.std_err = info.inverse().diagonal().cwiseSqrt();
  return fit;
}

GlmFit fit_selection_glm(const Eigen::VectorXd& d, const Eigen::MatrixXd& W, G0Kind g0,
                         const IrlsOptions& options) {
  return fit_glm(d, W, ResponseFamily::bernoulli(selection_link(g0)), options);
}

}  // namespace selmod
