#include "selmod/likelihood.hpp"

#include "selmod/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace selmod {

namespace {

enum class Order { Value, Gradient, Hessian };

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Derivatives of one observation's contribution in (mu, tau, psi), already
// multiplied through the mean link.
struct ObsTerms {
  double value = 0.0;
  double g_beta = 0.0;  // dl/deta
  double g_tau = 0.0;
  double g_psi = 0.0;
  double h_bb = 0.0;    // d2l/deta2
  double h_bt = 0.0;
  double h_tt = 0.0;
  double h_bp = 0.0;
  double h_tp = 0.0;
  double h_pp = 0.0;
  bool tail_warning = false;
};

struct Workspace {
  std::vector<ObsTerms> terms;
  std::vector<std::exception_ptr> errors;
};

// Neumaier-compensated sum.
double compensated_sum(const std::vector<ObsTerms>& terms) {
  double sum = 0.0;
  double c = 0.0;
  for (const auto& t : terms) {
    const double v = t.value;
    const double s = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      c += (sum - s) + v;
    } else {
      c += (v - s) + sum;
    }
    sum = s;
  }
  return sum + c;
}

class Evaluator {
 public:
  Evaluator(const Dataset& data, const Model& model, const ParamVector& params)
      : data_(data),
        family_(model.family),
        mech_(model.mechanism.with_alpha(params.alpha)),
        psi_(params.psi.value_or(1.0)),
        eta_(data.X * params.beta),
        tau_(data.W * params.gamma) {
    truncation_.fixed_K = model.truncation_K;
    truncation_.max_observed_y = data.max_observed_y();
  }

  ObsTerms observation(Eigen::Index i, Order order) const {
    ObsTerms t;
    const double mu = family_.mean_from_eta(eta_[i]);
    const double tau = tau_[i];
    const LinkDerivs ld = link_derivs(family_.link(), mu);
    const double mu_eta = 1.0 / ld.d1;
    const double mu_etaeta = -ld.d2 / (ld.d1 * ld.d1 * ld.d1);

    double l_mu = 0, l_tau = 0, l_psi = 0;
    double l_mumu = 0, l_mutau = 0, l_tautau = 0, l_mupsi = 0, l_taupsi = 0, l_psipsi = 0;

    if (data_.selected(i)) {
      const double y = data_.y[i];
      if (!family_.in_support(y)) throw SupportError("response outside the support of " + family_.name());
      const double theta = family_.theta_of_mu(mu);
      const BDerivs b = family_.b_derivs(theta);
      const DispersionDerivs a = family_.dispersion(psi_);
      const CarrierDerivs c = family_.carrier(y, psi_);
      const LogGTerms lg = mech_.log_G_terms(y, tau, mu);
      const double kernel = y * theta - b.b;
      t.value = kernel / a.a + c.d + lg.value;
      if (order == Order::Value) return t;

      const double resid = y - mu;
      l_mu = resid / (a.a * b.b2) + lg.d_mu;
      l_tau = lg.d_tau;
      l_psi = -kernel * a.a1 / (a.a * a.a) + c.d_psi;
      if (order == Order::Hessian) {
        l_mumu = -1.0 / (a.a * b.b2) - resid * b.b3 / (a.a * b.b2 * b.b2 * b.b2) + lg.d_mumu;
        l_mutau = lg.d_mutau;
        l_tautau = lg.d_tautau;
        l_mupsi = -resid / b.b2 * a.a1 / (a.a * a.a);
        l_psipsi = 2.0 * kernel * a.a1 * a.a1 / (a.a * a.a * a.a) - kernel * a.a2 / (a.a * a.a) + c.d_psipsi;
      }
    } else {
      const PiResult pr = selection_probability(mech_, family_, mu, psi_, tau, truncation_);
      t.tail_warning = pr.tail_warning;
      t.value = std::log(pr.one_minus_pi);
      if (order == Order::Value) return t;
      const double inv = 1.0 / pr.one_minus_pi;
      l_mu = -pr.d_mu * inv;
      l_tau = -pr.d_tau * inv;
      l_psi = -pr.d_psi * inv;
      if (order == Order::Hessian) {
        l_mumu = -pr.d_mumu * inv - l_mu * l_mu;
        l_mutau = -pr.d_mutau * inv - l_mu * l_tau;
        l_tautau = -pr.d_tautau * inv - l_tau * l_tau;
        l_mupsi = -pr.d_psimu * inv - l_mu * l_psi;
        l_taupsi = -pr.d_psitau * inv - l_tau * l_psi;
        l_psipsi = -pr.d_psipsi * inv - l_psi * l_psi;
      }
    }

    t.g_beta = l_mu * mu_eta;
    t.g_tau = l_tau;
    t.g_psi = l_psi;
    if (order == Order::Hessian) {
      t.h_bb = l_mumu * mu_eta * mu_eta + l_mu * mu_etaeta;
      t.h_bt = l_mutau * mu_eta;
      t.h_tt = l_tautau;
      t.h_bp = l_mupsi * mu_eta;
      t.h_tp = l_taupsi;
      t.h_pp = l_psipsi;
    }
    return t;
  }

  void run(Order order, unsigned threads, Workspace& ws) const {
    const Eigen::Index n = data_.n();
    ws.terms.assign(static_cast<std::size_t>(n), ObsTerms{});
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<Eigen::Index>(n, 1))));
    ws.errors.assign(workers, nullptr);
    auto block = [&](unsigned w) {
      const Eigen::Index lo = n * w / workers;
      const Eigen::Index hi = n * (w + 1) / workers;
      try {
        for (Eigen::Index i = lo; i < hi; ++i) ws.terms[static_cast<std::size_t>(i)] = observation(i, order);
      } catch (...) {
        ws.errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      block(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (unsigned w = 1; w < workers; ++w) pool.emplace_back(block, w);
      block(0);
    }
  }

 private:
  const Dataset& data_;
  const ResponseFamily& family_;
  SelectionMechanism mech_;
  double psi_;
  Eigen::VectorXd eta_;
  Eigen::VectorXd tau_;
  TruncationPolicy truncation_;
};

// Domain and support failures inside the sums mark the point infeasible;
// anything else is a genuine error.
bool infeasible(const Workspace& ws) {
  for (const auto& e : ws.errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const DomainError&) {
      return true;
    } catch (const SupportError&) {
      return true;
    }
  }
  return false;
}

ScoreHessian evaluate(const Dataset& data, const Model& model, const ParamVector& params, Order order,
                      const EvalOptions& options) {
  const Eigen::Index p = data.p();
  const Eigen::Index q = data.q();
  const bool with_psi = params.psi.has_value();
  const Eigen::Index k = p + q + (with_psi ? 1 : 0);
  if (params.beta.size() != p || params.gamma.size() != q) {
    throw std::invalid_argument("parameter dimensions do not match the design matrices");
  }
  if (with_psi == model.family.dispersion_known()) {
    throw std::invalid_argument("psi must be present exactly when the family has unknown dispersion");
  }

  ScoreHessian out;
  if (order != Order::Value) out.score = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
  if (order == Order::Hessian) out.hessian = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
  if (with_psi && !(*params.psi > 0.0)) {
    out.loglik = kNegInf;
    return out;
  }
  if (model.mechanism.requires_nonnegative_alpha() && params.alpha < 0.0) {
    out.loglik = kNegInf;
    return out;
  }

  Evaluator ev(data, model, params);
  Workspace ws;
  ev.run(order, options.threads, ws);
  if (infeasible(ws)) {
    out.loglik = kNegInf;
    return out;
  }
  for (const auto& e : ws.errors) {
    if (e) std::rethrow_exception(e);
  }

  out.loglik = compensated_sum(ws.terms);
  if (!std::isfinite(out.loglik)) {
    out.loglik = kNegInf;
    return out;
  }
  for (const auto& t : ws.terms) out.tail_warnings += t.tail_warning ? 1 : 0;
  if (order == Order::Value) return out;

  const Eigen::Index n = data.n();
  Eigen::VectorXd gb(n), gt(n);
  double gp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = ws.terms[static_cast<std::size_t>(i)];
    gb[i] = t.g_beta;
    gt[i] = t.g_tau;
    gp += t.g_psi;
  }
  out.score.head(p) = data.X.transpose() * gb;
  out.score.segment(p, q) = data.W.transpose() * gt;
  if (with_psi) out.score[k - 1] = gp;
  if (order == Order::Gradient) return out;

  Eigen::VectorXd hbb(n), hbt(n), htt(n), hbp(n), htp(n);
  double hpp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = ws.terms[static_cast<std::size_t>(i)];
    hbb[i] = t.h_bb;
    hbt[i] = t.h_bt;
    htt[i] = t.h_tt;
    hbp[i] = t.h_bp;
    htp[i] = t.h_tp;
    hpp += t.h_pp;
  }
  Eigen::MatrixXd& H = out.hessian;
  H.block(0, 0, p, p) = data.X.transpose() * hbb.asDiagonal() * data.X;
  H.block(0, p, p, q) = data.X.transpose() * hbt.asDiagonal() * data.W;
  H.block(p, 0, q, p) = H.block(0, p, p, q).transpose();
  H.block(p, p, q, q) = data.W.transpose() * htt.asDiagonal() * data.W;
  if (with_psi) {
    H.block(0, k - 1, p, 1) = data.X.transpose() * hbp;
    H.block(p, k - 1, q, 1) = data.W.transpose() * htp;
    H.block(k - 1, 0, 1, k - 1) = H.block(0, k - 1, k - 1, 1).transpose();
    H(k - 1, k - 1) = hpp;
  }
  return out;
}

}  // namespace

void Model::validate() const {
  if (mechanism.requires_nonnegative_support() && !family.nonnegative_support()) {
    throw std::invalid_argument("mechanism '" + mechanism.key() + "' requires a response with nonnegative support");
  }
  if (mechanism.requires_positive_mean() && family.kind() == FamilyKind::Normal) {
    throw std::invalid_argument("mechanism '" + mechanism.key() + "' requires a positive mean and cannot be used with the normal family");
  }
  if (truncation_K && *truncation_K < 1) throw std::invalid_argument("truncation_K must be at least 1");
}

bool ScoreHessian::feasible() const noexcept { return std::isfinite(loglik); }

double loglik(const Dataset& data, const Model& model, const ParamVector& params, const EvalOptions& options) {
  return evaluate(data, model, params, Order::Value, options).loglik;
}

ScoreHessian score(const Dataset& data, const Model& model, const ParamVector& params,
                   const EvalOptions& options) {
  return evaluate(data, model, params, Order::Gradient, options);
}

ScoreHessian hessian(const Dataset& data, const Model& model, const ParamVector& params,
                     const EvalOptions& options) {
  return evaluate(data, model, params, Order::Hessian, options);
}

ParamVector make_params(const Dataset& data, const Model& model, double alpha) {
  ParamVector pv;
  pv.alpha = alpha;
  pv.beta = Eigen::VectorXd::Zero(data.p());
  pv.gamma = Eigen::VectorXd::Zero(data.q());
  if (!model.family.dispersion_known()) pv.psi = 1.0;
  return pv;
}

}  // namespace selmod
