#include "modcomp/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "modcomp/error.hpp"

namespace modcomp {

DgpSpec DgpSpec::with_identity_covariates(VectorXd beta0, double sigma0_sq) {
  DgpSpec spec;
  spec.k = static_cast<int>(beta0.size());
  spec.beta0 = std::move(beta0);
  spec.sigma0_sq = sigma0_sq;
  spec.cov_x = MatrixXd::Identity(spec.k, spec.k);
  return spec;
}

void DgpSpec::validate() const {
  if (k <= 0) throw InputError("dgp: k must be positive");
  if (beta0.size() != k) throw InputError("dgp: beta0 must have length k");
  if (!(sigma0_sq >= 0.0) || !std::isfinite(sigma0_sq))
    throw InputError("dgp: sigma0_sq must be a finite nonnegative number");
  if (cov_x.rows() != k || cov_x.cols() != k) throw InputError("dgp: cov_x must be k x k");
  const double scale = std::max(cov_x.cwiseAbs().maxCoeff(), 1e-300);
  if ((cov_x - cov_x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("dgp: cov_x must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov_x, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw InputError("dgp: cov_x must be positive definite");
}

void Dataset::validate() const {
  if (X.rows() != y.size()) throw InputError("dataset: rows(X) must equal length(y)");
  if (X.cols() <= 0) throw InputError("dataset: at least one covariate is required");
}

Dataset sample_dataset(const DgpSpec& spec, int n, const Seed& seed) {
  if (n < 0) throw InputError("sample_dataset: n must be nonnegative");
  const int k = spec.k;
  const bool identity = spec.cov_x.isIdentity(0.0);
  MatrixXd chol;
  if (!identity) {
    Eigen::LLT<MatrixXd> llt(spec.cov_x);
    if (llt.info() != Eigen::Success) throw InputError("dgp: cov_x must be positive definite");
    chol = llt.matrixL();
  }

  Engine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(spec.sigma0_sq);

  Dataset d;
  d.X.resize(n, k);
  d.y.resize(n);
  VectorXd z(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) z(j) = normal(rng);
    if (identity)
      d.X.row(i) = z.transpose();
    else
      d.X.row(i) = (chol * z).transpose();
    const double eps = normal(rng);
    d.y(i) = d.X.row(i).dot(spec.beta0) + noise_sd * eps;
  }
  return d;
}

DgpSpec sample_dgp(int k, const std::vector<int>& relevant, const Seed& coef_seed, double sigma0_sq,
                   const std::optional<MatrixXd>& cov_x) {
  if (k <= 0) throw InputError("sample_dgp: k must be positive");
  if (relevant.empty()) throw InputError("no relevant covariates");
  for (int j : relevant)
    if (j < 1 || j > k) throw InputError("sample_dgp: relevant index " + std::to_string(j) + " outside 1..k");

  std::vector<int> sorted = relevant;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  Engine rng = make_engine(coef_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd beta = VectorXd::Zero(k);
  for (int j : sorted) beta(j - 1) = normal(rng);

  DgpSpec spec = DgpSpec::with_identity_covariates(std::move(beta), sigma0_sq);
  if (cov_x) spec.cov_x = *cov_x;
  spec.validate();
  return spec;
}

std::vector<int> true_model(const DgpSpec& spec) {
  std::vector<int> out;
  for (int j = 0; j < spec.beta0.size(); ++j)
    if (spec.beta0(j) != 0.0) out.push_back(j + 1);
  return out;
}

}  // namespace modcomp
