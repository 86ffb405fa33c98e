#pragma once

#include <string_view>

#include "modcomp/dgp.hpp"
#include "modcomp/model.hpp"

namespace modcomp {

/// Ingredients of the Laplace (Kass-Tierney-Kadane) expansion of E[sigma^2 | D].
struct KtkInput {
  double sigma2_hat = 0.0;            ///< maximum-likelihood sigma^2
  int model_size = 0;                 ///< |J|
  double prior_logderiv_sigma2 = 0.0; ///< d/d sigma^2 of ln prior, at the MLE
  int n = 0;

  void validate() const;
};

/** Sign conventions for the two 1/n correction terms.
 *
 * With d the prior log-derivative and s = sigma2_hat:
 *   laplace: s + (2 s^2 / n) d + s (|J|+4) / n
 *   flipped: s - (2 s^2 / n) d - s (|J|+4) / n
 *   mixed:   s - (2 s^2 / n) d + s (|J|+4) / n
 * Only `laplace` agrees with the exact conjugate posterior mean to O(1/n^2);
 * the other two are kept for the convergence-order comparison.
 */
enum class KtkSign { laplace, flipped, mixed };

KtkSign parse_ktk_sign(std::string_view name);
std::string_view to_string(KtkSign sign);

/// (1/n) min ||y - X_J beta||^2, via the unpenalised least-squares solve.
double sigma2_mle(const Dataset& data, const Model& model);

/// ln sigma2_mle + 2|J|/n. Throws NumericError("log of zero variance") on a perfect fit.
double aic(const Dataset& data, const Model& model);

/** ln sigma2_mle + ln(1 + (1/n) tr((X_J'X_J/n)^{-1} assumed_xx)).
 * A perfect fit yields -infinity rather than an error.
 */
double posterior_loss_large_n_approx(const Dataset& data, const AgentPrior& agent);

double ktk_expansion_sigma2(const KtkInput& input, KtkSign sign = KtkSign::laplace);

/** Analytic d/d sigma^2 of ln NIG(beta, sigma^2):
 *   -|J|/(2 s2) + gamma |J| ||beta||^2 / (2 s2^2) - (a0 + 1)/s2 + b0 / s2^2.
 */
double nig_log_density_deriv_sigma2(const Hyperparameters& hyper, const Model& model, const VectorXd& beta,
                                    double sigma_sq);

/// KTK input for an NIG agent on a dataset, with the prior derivative taken at the MLE.
KtkInput ktk_input(const Dataset& data, const AgentPrior& agent);

/// hyper with b0 replaced by c * n^exponent; exponent must exceed 2.
Hyperparameters drifting_prior_schedule(int n, double c, double exponent, const Hyperparameters& base);

}  // namespace modcomp
