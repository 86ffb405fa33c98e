#include "modcomp/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "modcomp/error.hpp"
#include "modcomp/posterior.hpp"

namespace modcomp {

namespace {

// Residual sums of squares this far below y'y are round-off from an exact fit.
constexpr double kExactFit = 1e-26;

struct LeastSquares {
  VectorXd beta;
  double rss = 0.0;
};

LeastSquares least_squares(const Dataset& data, const Model& model) {
  if (data.n() < 1) throw InputError("least squares needs at least one observation");
  LeastSquares ls;
  ls.beta = ridge_estimate(data, model, 0.0);
  VectorXd resid = data.y;
  for (int i = 0; i < model.size(); ++i) resid -= data.X.col(model.indices()[i] - 1) * ls.beta(i);
  ls.rss = resid.squaredNorm();
  if (ls.rss <= kExactFit * data.y.squaredNorm()) ls.rss = 0.0;
  return ls;
}

}  // namespace

void KtkInput::validate() const {
  if (!(sigma2_hat > 0.0)) throw InputError("ktk: sigma2_hat must be positive");
  if (n < 1) throw InputError("ktk: n must be >= 1");
  if (model_size < 1) throw InputError("ktk: model_size must be >= 1");
}

KtkSign parse_ktk_sign(std::string_view name) {
  if (name == "laplace") return KtkSign::laplace;
  if (name == "flipped") return KtkSign::flipped;
  if (name == "mixed") return KtkSign::mixed;
  throw InputError("unknown KTK sign variant '" + std::string(name) + "' (laplace|flipped|mixed)");
}

std::string_view to_string(KtkSign sign) {
  switch (sign) {
    case KtkSign::laplace: return "laplace";
    case KtkSign::flipped: return "flipped";
    case KtkSign::mixed: return "mixed";
  }
  return "?";
}

double sigma2_mle(const Dataset& data, const Model& model) {
  return least_squares(data, model).rss / data.n();
}

double aic(const Dataset& data, const Model& model) {
  const double s2 = sigma2_mle(data, model);
  if (!(s2 > 0.0)) throw NumericError("log of zero variance");
  return std::log(s2) + 2.0 * model.size() / data.n();
}

double posterior_loss_large_n_approx(const Dataset& data, const AgentPrior& agent) {
  const int p = agent.model.size();
  if (agent.assumed_xx.rows() != p || agent.assumed_xx.cols() != p) throw InputError("assumed_xx must be |J| x |J|");
  const double s2 = sigma2_mle(data, agent.model);
  // (1/n) (X'X/n)^{-1} == (X'X)^{-1}
  const double trace = uncertainty_trace(DesignMoments::of(data), agent.model, 0.0, agent.assumed_xx);
  const double fit = s2 > 0.0 ? std::log(s2) : -std::numeric_limits<double>::infinity();
  return fit + std::log1p(trace);
}

double ktk_expansion_sigma2(const KtkInput& in, KtkSign sign) {
  in.validate();
  const double s = in.sigma2_hat;
  const double prior_term = 2.0 * s * s / in.n * in.prior_logderiv_sigma2;
  const double curvature_term = s * (in.model_size + 4.0) / in.n;
  switch (sign) {
    case KtkSign::laplace: return s + prior_term + curvature_term;
    case KtkSign::flipped: return s - prior_term - curvature_term;
    case KtkSign::mixed: return s - prior_term + curvature_term;
  }
  return s;
}

double nig_log_density_deriv_sigma2(const Hyperparameters& hyper, const Model& model, const VectorXd& beta,
                                    double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw InputError("sigma_sq must be positive");
  if (beta.size() != model.size()) throw InputError("beta must have length |J|");
  const double p = model.size();
  const double s2 = sigma_sq;
  return -0.5 * p / s2 + hyper.gamma * p * beta.squaredNorm() / (2.0 * s2 * s2) - (hyper.a0 + 1.0) / s2 +
         hyper.b0 / (s2 * s2);
}

KtkInput ktk_input(const Dataset& data, const AgentPrior& agent) {
  const LeastSquares ls = least_squares(data, agent.model);
  KtkInput in;
  in.n = data.n();
  in.model_size = agent.model.size();
  in.sigma2_hat = ls.rss / data.n();
  if (!(in.sigma2_hat > 0.0)) throw NumericError("log of zero variance");
  in.prior_logderiv_sigma2 = nig_log_density_deriv_sigma2(agent.hyper, agent.model, ls.beta, in.sigma2_hat);
  return in;
}

Hyperparameters drifting_prior_schedule(int n, double c, double exponent, const Hyperparameters& base) {
  if (!(exponent > 2.0)) throw InputError("schedule not in omega(n^2)");
  if (n < 1) throw InputError("drifting prior: n must be positive");
  if (!(c > 0.0)) throw InputError("drifting prior: c must be positive");
  Hyperparameters h = base;
  h.b0 = c * std::pow(static_cast<double>(n), exponent);
  return h;
}

}  // namespace modcomp
