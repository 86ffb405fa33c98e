#pragma once

#include <utility>
#include <vector>

#include "modcomp/dgp.hpp"
#include "modcomp/model.hpp"
#include "modcomp/seed.hpp"

namespace modcomp::oracle {

/** Tensor grid for brute-force integration over (beta_J, sigma^2).
 *
 * beta coordinates are expressed along the principal axes of
 * X_J'X_J + gamma |J| I, in units of sigma / sqrt(eigenvalue); the sigma^2
 * axis is integrated in log sigma^2. Both are changes of variables only: the
 * integrand is always the raw Gaussian likelihood times the NIG prior density.
 */
struct QuadratureGrid {
  std::vector<std::pair<double, double>> beta_range;
  std::vector<int> beta_points;
  std::pair<double, double> sigma2_range;
  int sigma2_points = 0;

  /// Point counts >= 41, finite ordered ranges, positive sigma^2 bounds.
  void validate() const;
};

/** Grid whose sigma^2 range starts from the prior's 0.0005/0.9995 quantiles,
 * is stretched to cover the data scale and then widened in log space.
 */
QuadratureGrid default_grid(const Dataset& data, const Model& model, const Hyperparameters& hyper,
                            int beta_points = 81, int sigma2_points = 1601);

/// Same grid with every point count doubled (refinement check).
QuadratureGrid refined(const QuadratureGrid& grid);

/** E[sigma^2 | D] by log-sum-exp stabilised trapezoidal quadrature.
 *
 * Requires |J| <= 2, n >= 1 and gamma > 0. Throws NumericError("grid truncation")
 * when the grid holds less than 99.9% of the prior sigma^2 mass or of the
 * conditional beta mass.
 */
double quadrature_posterior_sigma2(const Dataset& data, const Model& model, const Hyperparameters& hyper,
                                   const QuadratureGrid& grid);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long reps = 0;
};

/** Monte Carlo estimate of the agent's Bayes risk E_{m(pi)}[L*(pi, D_n)].
 *
 * Each replication draws (beta_J, sigma^2) from the agent's NIG prior, a dataset
 * of size n from the agent's own model with x ~ N(0, I), and evaluates the
 * posterior loss. Replication r uses seed.with_rep(r).
 */
MonteCarloEstimate mc_marginal_loss(const AgentPrior& agent, int n, long reps, const Seed& seed,
                                    unsigned threads = 1);

}  // namespace modcomp::oracle
