#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "modcomp/seed.hpp"

namespace modcomp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/** The true data generating process: y = x'beta0 + eps with x ~ N(0, cov_x) and
 * eps ~ N(0, sigma0_sq), independent across observations.
 */
struct DgpSpec {
  int k = 0;
  VectorXd beta0;
  double sigma0_sq = 1.0;
  MatrixXd cov_x;

  /// Spec with identity covariate moments.
  static DgpSpec with_identity_covariates(VectorXd beta0, double sigma0_sq = 1.0);

  /// Throws InputError when a field breaks the type invariants.
  void validate() const;

  /// True when sigma0_sq == 0; such specs are legal but agents' priors assume positive noise.
  bool noiseless() const { return sigma0_sq == 0.0; }
};

/// n observations on k covariates.
struct Dataset {
  VectorXd y;
  MatrixXd X;

  int n() const { return static_cast<int>(y.size()); }
  int k() const { return static_cast<int>(X.cols()); }

  void validate() const;
};

Dataset sample_dataset(const DgpSpec& spec, int n, const Seed& seed);

/** Draws a spec whose coefficients in `relevant` (1-based) are i.i.d. standard
 * normal and exactly zero elsewhere. cov_x defaults to the identity.
 */
DgpSpec sample_dgp(int k, const std::vector<int>& relevant, const Seed& coef_seed,
                   double sigma0_sq = 1.0, const std::optional<MatrixXd>& cov_x = std::nullopt);

/// 1-based indices of the nonzero coefficients.
std::vector<int> true_model(const DgpSpec& spec);

}  // namespace modcomp
