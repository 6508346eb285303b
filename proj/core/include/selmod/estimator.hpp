#pragma once

// Profile-likelihood estimation of the selection parameter alpha:
//
//   L_p(alpha) = max_theta log L(alpha, theta)
//
// alpha-hat maximizes L_p; the likelihood-ratio set
// { alpha : 2[L_p(alpha-hat) - L_p(alpha)] <= q } gives its confidence
// interval, and standard errors for theta come from the observed information
// at (alpha-hat, theta-hat) with alpha held fixed. The variability of
// alpha-hat is not propagated into those standard errors.

#include "selmod/dataset.hpp"
#include "selmod/glm.hpp"
#include "selmod/likelihood.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace selmod {

struct InnerOptions {
  int max_iter = 200;
  double score_tol = 1e-8;
  double rel_tol = 1e-12;
  EvalOptions eval;
};

struct InnerResult {
  ParamVector params;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

// Newton ascent in theta at fixed alpha with backtracking line search; falls
// back to gradient ascent with an adaptive step when the Newton direction is
// not an ascent direction. Non-convergence is reported through the result.
InnerResult inner_maximize(const Dataset& data, const Model& model, double alpha, const ParamVector& start,
                           const InnerOptions& options = {});

// alpha = 0 starting values from the two decoupled GLMs.
struct Baseline {
  GlmFit response;
  GlmFit selection;
  ParamVector params;
};
Baseline fit_baseline(const Dataset& data, const Model& model);

struct ProfilePoint {
  double alpha = 0.0;
  double loglik = 0.0;  // NaN when the inner fit failed
  ParamVector params;
  bool ok = false;
  int iterations = 0;
};

// Caches inner maximizations and warm-starts each new alpha from the nearest
// successfully evaluated one.
class ProfileLikelihood {
 public:
  ProfileLikelihood(const Dataset& data, const Model& model, ParamVector start, InnerOptions options = {});

  const ProfilePoint& evaluate(double alpha);
  // L_p(alpha), -infinity when the inner fit failed.
  double value(double alpha);
  std::vector<ProfilePoint> points() const;
  int evaluations() const noexcept { return static_cast<int>(cache_.size()); }

 private:
  const Dataset& data_;
  const Model& model_;
  ParamVector start_;
  InnerOptions options_;
  std::map<double, ProfilePoint> cache_;
};

enum class BoundaryDiagnostic { Interior, MonotoneIncreasing, MonotoneDecreasing, AtConstraint };
std::string to_string(BoundaryDiagnostic b);

enum class BoundKind { Finite, Unbounded, AtConstraint, NotComputed };
std::string to_string(BoundKind b);

struct CiBound {
  double value = 0.0;
  BoundKind kind = BoundKind::NotComputed;
};

struct AlphaInterval {
  CiBound lower;
  CiBound upper;
  double level = 0.95;
  double quantile = 0.0;  // chi-square(1) quantile at level
};

struct CiSearch {
  double step = 0.25;     // outward step while looking for a crossing
  int max_steps = 40;     // per side
  double tol = 1e-5;      // bisection tolerance in alpha
  std::optional<double> lower_limit;  // alpha constraint, e.g. 0 for expn-mgf
};

// Endpoints solve L_p(alpha) = L_p(alpha_hat) - q/2 by bisection on each side.
AlphaInterval alpha_confidence(const std::function<double(double)>& profile, double alpha_hat, double level,
                               const CiSearch& search = {});

struct ProfileCurve {
  std::vector<double> alphas;      // strictly increasing
  std::vector<double> loglik;
  std::vector<double> rel_loglik;  // loglik - max, NaN for failed points
  std::vector<bool> ok;
  Eigen::MatrixXd theta_at;        // one row per alpha
};

ProfileCurve make_curve(const std::vector<ProfilePoint>& points);

struct StandardErrors {
  Eigen::VectorXd std_err;
  Eigen::VectorXd ratio;
  double min_eigenvalue = 0.0;
  bool ok = false;
};

// sqrt(diag((-H)^{-1})) at (alpha_hat, theta_hat); withheld (ok = false)
// when -H is not positive definite.
StandardErrors standard_errors(const Dataset& data, const Model& model, const ParamVector& params,
                               const EvalOptions& eval = {});

struct GridConfig {
  // Explicit alpha grid; empty means the automatic bracketing scan. A single
  // value fixes alpha.
  std::vector<double> alphas;
  // Grid step is 0.25 * scale; 0 selects the default scale heuristic.
  double scale = 0.0;
  int max_points_per_side = 40;
  double refine_tol = 1e-4;
  double ci_level = 0.95;
  double ci_tol = 1e-5;
  // Evenly spaced extra points across the interval for plotting.
  int display_points = 21;
  // Fraction of the grid allowed to fail before the fit is abandoned.
  double max_dropped_fraction = 0.2;
  InnerOptions inner;
};

struct FitReport {
  double alpha_hat = 0.0;
  ParamVector theta_hat;
  Eigen::VectorXd std_err;
  Eigen::VectorXd ratio;
  bool std_err_ok = false;
  double min_info_eigenvalue = 0.0;
  double loglik_max = 0.0;
  AlphaInterval alpha_ci;
  ProfileCurve profile;
  BoundaryDiagnostic boundary = BoundaryDiagnostic::Interior;
  Baseline baseline;
  double grid_step = 0.0;
  int dropped_points = 0;
  int profile_evaluations = 0;
  int tail_warnings = 0;
  std::vector<std::string> warnings;
};

double default_alpha_scale(const Dataset& data, const Model& model, const ParamVector& baseline);

// Throws ConvergenceError when the baseline fits fail or more than the allowed
// fraction of grid points cannot be maximized.
FitReport profile_maximize(const Dataset& data, const Model& model, const GridConfig& grid = {});

// Profile values at an explicit list of alphas, warm-started outward from the
// alpha closest to zero.
ProfileCurve profile_at(const Dataset& data, const Model& model, std::vector<double> alphas,
                        const InnerOptions& inner = {});

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace selmod
