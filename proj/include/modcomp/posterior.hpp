#pragma once

#include <Eigen/Core>

#include "modcomp/dgp.hpp"
#include "modcomp/model.hpp"

namespace modcomp {

/** Cross-products X'X, X'y and y'y of one dataset.
 *
 * Every agent's posterior depends on the data only through these, so a
 * competition computes them once and hands each agent the sub-blocks it uses.
 */
struct DesignMoments {
  MatrixXd xtx;
  VectorXd xty;
  double yty = 0.0;
  int n = 0;

  static DesignMoments of(const Dataset& data);
  int k() const { return static_cast<int>(xtx.rows()); }
};

/// Posterior moments of a conjugate NIG agent.
struct PosteriorSummary {
  VectorXd ridge_beta;        ///< E[beta_J | D], the ridge estimate with penalty gamma |J|
  double sigma2_mean = 0.0;   ///< E[sigma^2 | D]
  MatrixXd precision_inverse; ///< (X_J'X_J + gamma |J| I)^{-1}
  double penalized_rss = 0.0; ///< min_beta ||y - X_J beta||^2 + gamma |J| ||beta||^2
  int n = 0;
};

/// Posterior expected loss of the Bayes predictor, split as model fit + estimation uncertainty.
struct LossReport {
  double model_fit = 0.0;
  double estimation_uncertainty = 0.0;
  double total = 0.0;
};

/** Ridge estimate (X_J'X_J + gamma |J| I)^{-1} X_J'y via a Cholesky solve.
 *
 * Throws NumericError("singular design") when gamma == 0 and X_J is column-rank deficient.
 */
VectorXd ridge_estimate(const Dataset& data, const Model& model, double gamma);
VectorXd ridge_estimate(const DesignMoments& moments, const Model& model, double gamma);

PosteriorSummary posterior_summary(const Dataset& data, const AgentPrior& agent);
PosteriorSummary posterior_summary(const DesignMoments& moments, const AgentPrior& agent);

LossReport posterior_loss(const Dataset& data, const AgentPrior& agent);
LossReport posterior_loss(const DesignMoments& moments, const AgentPrior& agent);

/// tr((X_J'X_J + gamma |J| I)^{-1} assumed_xx)
double uncertainty_trace(const DesignMoments& moments, const Model& model, double gamma, const MatrixXd& assumed_xx);

/// sigma^2 (1 + tr((X_J'X_J + gamma |J| I)^{-1} assumed_xx)): the loss with a point-mass variance prior.
double posterior_loss_known_variance(const Dataset& data, const Model& model, double gamma, double sigma_sq,
                                     const MatrixXd& assumed_xx);
double posterior_loss_known_variance(const DesignMoments& moments, const Model& model, double gamma,
                                     double sigma_sq, const MatrixXd& assumed_xx);

/// x_J' E[beta_J | D] for a full-length covariate vector x.
double bayes_predict(const PosteriorSummary& summary, const Model& model, const VectorXd& x);

/** Bayes risk before data, in the gamma -> 0 limit with x ~ N(0, I):
 * (b0/(a0-1)) (1 + |J|/(n-|J|-1)). Requires n > |J| + 1.
 */
double exante_expected_loss(const AgentPrior& agent, int n);

}  // namespace modcomp
