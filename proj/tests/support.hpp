#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "modcomp/dgp.hpp"
#include "modcomp/model.hpp"

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dataset with i.i.d. N(0,1) covariates and y = X beta + sd * eps.
inline modcomp::Dataset random_dataset(std::mt19937_64& rng, int n, int k, double noise_sd = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  modcomp::Dataset d;
  d.X.resize(n, k);
  d.y.resize(n);
  VectorXd beta(k);
  for (int j = 0; j < k; ++j) beta(j) = z(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) d.X(i, j) = z(rng);
    d.y(i) = d.X.row(i).dot(beta) + noise_sd * z(rng);
  }
  return d;
}

inline MatrixXd columns(const modcomp::Dataset& d, const modcomp::Model& m) {
  MatrixXd out(d.n(), m.size());
  for (int i = 0; i < m.size(); ++i) out.col(i) = d.X.col(m.indices()[i] - 1);
  return out;
}

/// Golden-section minimiser on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 300) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iters; ++i) {
    if (f(c) < f(d)) b = d;
    else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/** Penalised least squares via Householder QR of the stacked system
 * [X; sqrt(lambda) I] beta ~ [y; 0]; returns the minimum objective value.
 */
inline double penalized_min_by_qr(const MatrixXd& x, const VectorXd& y, double lambda, VectorXd* argmin = nullptr) {
  const int n = static_cast<int>(x.rows()), p = static_cast<int>(x.cols());
  MatrixXd a(n + p, p);
  a << x, std::sqrt(lambda) * MatrixXd::Identity(p, p);
  VectorXd b = VectorXd::Zero(n + p);
  b.head(n) = y;
  const VectorXd beta = a.householderQr().solve(b);
  if (argmin) *argmin = beta;
  return (y - x * beta).squaredNorm() + lambda * beta.squaredNorm();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

/// Least-squares slope of log(err) against log(n).
inline double loglog_slope(const std::vector<double>& ns, const std::vector<double>& errs) {
  double mx = 0, my = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(ns[i]) / m;
    my += std::log(errs[i]) / m;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxy += dx * (std::log(errs[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace testing
