#include "selmod/estimator.hpp"

#include "selmod/error.hpp"
#include "selmod/special.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace selmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Step {
  ParamVector params;
  double loglik;
  double t;
};

// Backtracking with an Armijo condition along dir from cur.
std::optional<Step> line_search(const Dataset& data, const Model& model, const ParamVector& cur, double l0,
                                const Eigen::VectorXd& grad, const Eigen::VectorXd& dir,
                                const EvalOptions& eval) {
  const Eigen::VectorXd theta = cur.theta();
  const double slope = dir.dot(grad);
  double t = 1.0;
  for (int k = 0; k < 60; ++k, t *= 0.5) {
    ParamVector cand = cur;
    cand.set_theta(theta + t * dir);
    const double l = loglik(data, model, cand, eval);
    if (std::isfinite(l) && l >= l0 + 1e-4 * t * slope) return Step{std::move(cand), l, t};
  }
  return std::nullopt;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

InnerResult inner_maximize(const Dataset& data, const Model& model, double alpha, const ParamVector& start,
                           const InnerOptions& options) {
  ParamVector cur = start;
  cur.alpha = alpha;
  ScoreHessian sh = hessian(data, model, cur, options.eval);
  if (!sh.feasible()) {
    throw std::invalid_argument("infeasible starting point at alpha = " + std::to_string(alpha));
  }

  InnerResult r;
  double grad_step = 1.0 / std::max(1.0, max_abs(sh.score));
  for (r.iterations = 0; r.iterations < options.max_iter; ++r.iterations) {
    const Eigen::VectorXd& g = sh.score;
    if (max_abs(g) < options.score_tol) {
      r.converged = true;
      break;
    }

    Eigen::VectorXd newton_dir;
    bool newton = false;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-sh.hessian);
    if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
      newton_dir = ldlt.solve(g);
      newton = newton_dir.allFinite() && newton_dir.dot(g) > 0.0;
    }

    std::optional<Step> step;
    if (newton) {
      step = line_search(data, model, cur, sh.loglik, g, newton_dir, options.eval);
      if (!step) {
        // Newton decrement at rounding level: nothing left to gain.
        if (newton_dir.dot(g) <= 1e-12 * std::max(1.0, std::fabs(sh.loglik))) {
          r.converged = true;
          break;
        }
        newton = false;
      }
    }
    if (!newton) {
      step = line_search(data, model, cur, sh.loglik, g, grad_step * g, options.eval);
      if (!step) break;
      grad_step *= step->t == 1.0 ? 2.0 : step->t;
    }

    const double rel = std::fabs(step->loglik - sh.loglik) / std::max(1.0, std::fabs(sh.loglik));
    const bool full_newton = newton && step->t == 1.0;
    cur = std::move(step->params);
    sh = hessian(data, model, cur, options.eval);
    if (!sh.feasible()) break;
    if (full_newton && rel < options.rel_tol) {
      ++r.iterations;
      r.converged = true;
      break;
    }
  }
  r.params = cur;
  r.loglik = sh.loglik;
  r.grad_norm = sh.feasible() ? max_abs(sh.score) : kInf;
  return r;
}

Baseline fit_baseline(const Dataset& data, const Model& model) {
  const Eigen::Index n1 = data.n_selected();
  if (n1 == 0) throw ConvergenceError("no selected observations: the response model cannot be fitted", kInf);
  if (n1 == data.n()) throw ConvergenceError("every observation is selected: the selection model cannot be fitted", kInf);
  Eigen::VectorXd ys(n1);
  Eigen::MatrixXd Xs(n1, data.p());
  for (Eigen::Index i = 0, k = 0; i < data.n(); ++i) {
    if (!data.selected(i)) continue;
    ys[k] = data.y[i];
    Xs.row(k) = data.X.row(i);
    ++k;
  }
  Baseline b;
  b.response = fit_glm(ys, Xs, model.family);
  b.selection = fit_selection_glm(data.d.cast<double>(), data.W, model.mechanism.g0_kind());
  if (!b.response.converged) {
    throw ConvergenceError("response GLM at alpha = 0 did not converge", b.response.score_norm);
  }
  if (!b.selection.converged) {
    throw ConvergenceError("selection GLM at alpha = 0 did not converge", b.selection.score_norm);
  }
  b.params.alpha = 0.0;
  b.params.beta = b.response.coef;
  b.params.gamma = b.selection.coef;
  if (!model.family.dispersion_known()) b.params.psi = b.response.dispersion;
  return b;
}

ProfileLikelihood::ProfileLikelihood(const Dataset& data, const Model& model, ParamVector start,
                                     InnerOptions options)
    : data_(data), model_(model), start_(std::move(start)), options_(options) {}

const ProfilePoint& ProfileLikelihood::evaluate(double alpha) {
  if (auto it = cache_.find(alpha); it != cache_.end()) return it->second;

  ProfilePoint pt;
  pt.alpha = alpha;
  pt.loglik = kNaN;
  pt.params = start_;
  pt.params.alpha = alpha;

  std::vector<const ParamVector*> starts;
  const ProfilePoint* nearest = nullptr;
  for (const auto& [a, p] : cache_) {
    if (p.ok && (!nearest || std::fabs(a - alpha) < std::fabs(nearest->alpha - alpha))) nearest = &p;
  }
  if (nearest) starts.push_back(&nearest->params);
  starts.push_back(&start_);

  if (!(model_.mechanism.requires_nonnegative_alpha() && alpha < 0.0)) {
    for (const ParamVector* s : starts) {
      try {
        InnerResult r = inner_maximize(data_, model_, alpha, *s, options_);
        pt.iterations += r.iterations;
        if (r.converged && std::isfinite(r.loglik)) {
          pt.params = std::move(r.params);
          pt.loglik = r.loglik;
          pt.ok = true;
          break;
        }
      } catch (const std::invalid_argument&) {
        // infeasible start; try the next one
      }
    }
  }
  return cache_.emplace(alpha, std::move(pt)).first->second;
}

double ProfileLikelihood::value(double alpha) {
  const ProfilePoint& p = evaluate(alpha);
  return p.ok ? p.loglik : -kInf;
}

std::vector<ProfilePoint> ProfileLikelihood::points() const {
  std::vector<ProfilePoint> out;
  out.reserve(cache_.size());
  for (const auto& [a, p] : cache_) out.push_back(p);
  return out;
}

std::string to_string(BoundaryDiagnostic b) {
  switch (b) {
    case BoundaryDiagnostic::Interior: return "interior";
    case BoundaryDiagnostic::MonotoneIncreasing: return "monotone-increasing";
    case BoundaryDiagnostic::MonotoneDecreasing: return "monotone-decreasing";
    case BoundaryDiagnostic::AtConstraint: return "at-constraint";
  }
  return "?";
}

std::string to_string(BoundKind b) {
  switch (b) {
    case BoundKind::Finite: return "finite";
    case BoundKind::Unbounded: return "unbounded";
    case BoundKind::AtConstraint: return "at-constraint";
    case BoundKind::NotComputed: return "not-computed";
  }
  return "?";
}

AlphaInterval alpha_confidence(const std::function<double(double)>& profile, double alpha_hat, double level,
                               const CiSearch& search) {
  AlphaInterval ci;
  ci.level = level;
  ci.quantile = special::chi2_1_quantile(level);
  const double target = profile(alpha_hat) - 0.5 * ci.quantile;
  auto excess = [&](double a) {
    const double v = profile(a);
    return std::isfinite(v) ? v - target : -kInf;
  };
  auto tolerance = [&](double a, double b) { return std::fabs(b - a) <= search.tol; };
  auto root = [&](double inside, double outside) {
    const auto [a, b] = boost::math::tools::bisect(
        [&](double x) {
          const double e = excess(x);
          return std::isfinite(e) ? e : -1.0;
        },
        std::min(inside, outside), std::max(inside, outside), tolerance);
    return 0.5 * (a + b);
  };

  // upper side
  {
    double prev = alpha_hat;
    ci.upper = {kInf, BoundKind::Unbounded};
    for (int k = 1; k <= search.max_steps; ++k) {
      const double a = alpha_hat + k * search.step;
      if (excess(a) < 0.0) {
        ci.upper = {root(prev, a), BoundKind::Finite};
        break;
      }
      prev = a;
    }
  }
  // lower side
  {
    double prev = alpha_hat;
    ci.lower = {-kInf, BoundKind::Unbounded};
    for (int k = 1; k <= search.max_steps; ++k) {
      double a = alpha_hat - k * search.step;
      const bool at_limit = search.lower_limit && a <= *search.lower_limit;
      if (at_limit) a = *search.lower_limit;
      if (excess(a) < 0.0) {
        ci.lower = {root(prev, a), BoundKind::Finite};
        break;
      }
      if (at_limit) {
        ci.lower = {a, BoundKind::AtConstraint};
        break;
      }
      prev = a;
    }
  }
  return ci;
}

ProfileCurve make_curve(const std::vector<ProfilePoint>& points) {
  std::vector<ProfilePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  ProfileCurve c;
  double best = -kInf;
  for (const auto& p : sorted) {
    if (p.ok) best = std::max(best, p.loglik);
  }
  const Eigen::Index k = sorted.empty() ? 0 : sorted.front().params.theta_size();
  c.theta_at.resize(static_cast<Eigen::Index>(sorted.size()), k);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& p = sorted[i];
    c.alphas.push_back(p.alpha);
    c.loglik.push_back(p.ok ? p.loglik : kNaN);
    c.rel_loglik.push_back(p.ok ? p.loglik - best : kNaN);
    c.ok.push_back(p.ok);
    c.theta_at.row(static_cast<Eigen::Index>(i)) = p.params.theta().transpose();
  }
  return c;
}

StandardErrors standard_errors(const Dataset& data, const Model& model, const ParamVector& params,
                               const EvalOptions& eval) {
  StandardErrors se;
  const ScoreHessian sh = hessian(data, model, params, eval);
  const Eigen::Index k = params.theta_size();
  se.std_err = Eigen::VectorXd::Constant(k, kNaN);
  se.ratio = Eigen::VectorXd::Constant(k, kNaN);
  if (!sh.feasible()) {
    se.min_eigenvalue = kNaN;
    return se;
  }
  const Eigen::MatrixXd info = -0.5 * (sh.hessian + sh.hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info, Eigen::EigenvaluesOnly);
  se.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (!(se.min_eigenvalue > 0.0)) return se;
  const Eigen::MatrixXd cov = info.llt().solve(Eigen::MatrixXd::Identity(k, k));
  se.std_err = cov.diagonal().cwiseSqrt();
  se.ratio = params.theta().cwiseQuotient(se.std_err);
  se.ok = se.std_err.allFinite();
  return se;
}

double default_alpha_scale(const Dataset& data, const Model& model, const ParamVector& baseline) {
  if (!model.mechanism.standardized()) return 1.0;
  const Eigen::VectorXd eta = data.X * baseline.beta;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) sum += model.family.mean_from_eta(eta[i]);
  const double mean_mu = sum / static_cast<double>(std::max<Eigen::Index>(eta.size(), 1));
  return mean_mu > 0.0 ? 1.0 / mean_mu : 1.0;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = 1.0 / std::numbers::phi;
  double a = lo, b = hi;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

namespace {

// Evaluates alphas outward from the one closest to zero so that every point
// is warm-started from a neighbour.
void evaluate_outward(ProfileLikelihood& pl, std::vector<double> alphas) {
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  if (alphas.empty()) return;
  std::size_t centre = 0;
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (std::fabs(alphas[i]) < std::fabs(alphas[centre])) centre = i;
  }
  for (std::size_t i = centre; i < alphas.size(); ++i) pl.evaluate(alphas[i]);
  for (std::size_t i = centre; i-- > 0;) pl.evaluate(alphas[i]);
}

}  // namespace

ProfileCurve profile_at(const Dataset& data, const Model& model, std::vector<double> alphas,
                        const InnerOptions& inner) {
  model.validate();
  const Baseline base = fit_baseline(data, model);
  ProfileLikelihood pl(data, model, base.params, inner);
  evaluate_outward(pl, alphas);
  return make_curve(pl.points());
}

FitReport profile_maximize(const Dataset& data, const Model& model, const GridConfig& grid) {
  model.validate();
  data.validate();
  FitReport rep;
  rep.baseline = fit_baseline(data, model);
  ProfileLikelihood pl(data, model, rep.baseline.params, grid.inner);

  const bool constrained = model.mechanism.requires_nonnegative_alpha();
  const double scale = grid.scale > 0.0 ? grid.scale : default_alpha_scale(data, model, rep.baseline.params);
  const double delta = 0.25 * scale;
  rep.grid_step = delta;

  std::vector<double> grid_alphas;
  const bool fixed = grid.alphas.size() == 1;

  if (!grid.alphas.empty()) {
    for (double a : grid.alphas) {
      if (constrained && a < 0.0) throw std::invalid_argument("mechanism '" + model.mechanism.key() + "' requires alpha >= 0");
    }
    grid_alphas = grid.alphas;
    std::sort(grid_alphas.begin(), grid_alphas.end());
    grid_alphas.erase(std::unique(grid_alphas.begin(), grid_alphas.end()), grid_alphas.end());
    evaluate_outward(pl, grid_alphas);
  } else {
    grid_alphas.push_back(0.0);
    pl.evaluate(0.0);
    // Walk each side until the profile first decreases.
    auto walk = [&](double sign) {
      double prev = pl.value(0.0);
      for (int k = 1; k <= grid.max_points_per_side; ++k) {
        const double a = sign * k * delta;
        grid_alphas.push_back(a);
        const ProfilePoint& p = pl.evaluate(a);
        if (!p.ok) continue;
        if (p.loglik < prev) return;
        prev = p.loglik;
      }
    };
    walk(1.0);
    if (!constrained) walk(-1.0);
    std::sort(grid_alphas.begin(), grid_alphas.end());
  }

  std::vector<const ProfilePoint*> good;
  for (double a : grid_alphas) {
    const ProfilePoint& p = pl.evaluate(a);
    if (p.ok) {
      good.push_back(&p);
    } else {
      ++rep.dropped_points;
      rep.warnings.push_back("inner maximization failed at alpha = " + std::to_string(a) + "; point dropped");
    }
  }
  if (good.empty() ||
      rep.dropped_points > grid.max_dropped_fraction * static_cast<double>(grid_alphas.size())) {
    throw ConvergenceError("profile likelihood failed at " + std::to_string(rep.dropped_points) + " of " +
                               std::to_string(grid_alphas.size()) + " grid points",
                           kInf);
  }

  std::size_t m = 0;
  for (std::size_t i = 1; i < good.size(); ++i) {
    if (good[i]->loglik > good[m]->loglik) m = i;
  }
  const bool at_right = m + 1 == good.size();
  const bool at_left = m == 0;

  if (fixed) {
    rep.alpha_hat = good[m]->alpha;
    rep.boundary = BoundaryDiagnostic::Interior;
  } else if (!at_left && !at_right) {
    rep.alpha_hat = golden_section_max([&](double a) { return pl.value(a); }, good[m - 1]->alpha,
                                       good[m + 1]->alpha, grid.refine_tol);
    rep.boundary = BoundaryDiagnostic::Interior;
  } else if (at_left && constrained && good[m]->alpha == 0.0) {
    rep.alpha_hat = 0.0;
    rep.boundary = BoundaryDiagnostic::AtConstraint;
  } else if (at_right && good.size() > 1) {
    rep.alpha_hat = good[m]->alpha;
    rep.boundary = BoundaryDiagnostic::MonotoneIncreasing;
  } else if (at_left && good.size() > 1) {
    rep.alpha_hat = good[m]->alpha;
    rep.boundary = BoundaryDiagnostic::MonotoneDecreasing;
  } else {
    rep.alpha_hat = good[m]->alpha;
  }
  if (rep.boundary != BoundaryDiagnostic::Interior) {
    rep.warnings.push_back("profile log-likelihood has no interior maximum within the scanned range (" +
                           to_string(rep.boundary) + ")");
  }

  if (fixed) {
    rep.alpha_ci.level = grid.ci_level;
    rep.alpha_ci.quantile = special::chi2_1_quantile(grid.ci_level);
  } else {
    CiSearch search;
    search.step = delta;
    search.max_steps = grid.max_points_per_side;
    search.tol = grid.ci_tol;
    if (constrained) search.lower_limit = 0.0;
    rep.alpha_ci = alpha_confidence([&](double a) { return pl.value(a); }, rep.alpha_hat, grid.ci_level, search);

    if (grid.alphas.empty() && grid.display_points > 1 && rep.alpha_ci.lower.kind != BoundKind::Unbounded &&
        rep.alpha_ci.upper.kind != BoundKind::Unbounded) {
      const double lo = rep.alpha_ci.lower.value;
      const double hi = rep.alpha_ci.upper.value;
      const double w = std::max(hi - lo, grid.refine_tol);
      double from = lo - 0.5 * w;
      if (constrained) from = std::max(from, 0.0);
      const double to = hi + 0.5 * w;
      std::vector<double> extra;
      for (int i = 0; i < grid.display_points; ++i) {
        extra.push_back(from + (to - from) * i / (grid.display_points - 1));
      }
      std::sort(extra.begin(), extra.end(),
                [&](double a, double b) { return std::fabs(a - rep.alpha_hat) < std::fabs(b - rep.alpha_hat); });
      for (double a : extra) pl.evaluate(a);
    }
  }

  // Keep alpha_hat the best evaluated point so that the relative curve peaks
  // exactly there.
  ProfilePoint best = pl.evaluate(rep.alpha_hat);
  for (const ProfilePoint& p : pl.points()) {
    if (p.ok && (!best.ok || p.loglik > best.loglik)) best = p;
  }
  rep.alpha_hat = best.alpha;
  rep.theta_hat = best.params;
  rep.loglik_max = best.loglik;

  const StandardErrors se = standard_errors(data, model, rep.theta_hat, grid.inner.eval);
  rep.std_err = se.std_err;
  rep.ratio = se.ratio;
  rep.std_err_ok = se.ok;
  rep.min_info_eigenvalue = se.min_eigenvalue;
  if (!se.ok) {
    rep.warnings.push_back("observed information is not positive definite (smallest eigenvalue " +
                           std::to_string(se.min_eigenvalue) + "); standard errors withheld");
  }
  rep.tail_warnings = score(data, model, rep.theta_hat, grid.inner.eval).tail_warnings;
  if (rep.tail_warnings > 0) {
    rep.warnings.push_back(std::to_string(rep.tail_warnings) +
                           " observations left truncation tail mass above 1e-10");
  }
  rep.profile = make_curve(pl.points());
  rep.profile_evaluations = pl.evaluations();
  return rep;
}

}  // namespace selmod
