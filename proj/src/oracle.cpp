#include "modcomp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "modcomp/error.hpp"
#include "modcomp/parallel.hpp"
#include "modcomp/posterior.hpp"

namespace modcomp::oracle {

namespace {

constexpr double kMinMass = 0.999;

// Streaming log-sum-exp.
class LogSum {
 public:
  void add(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity()) return;
    if (log_value <= max_) {
      sum_ += std::exp(log_value - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_value) + 1.0;
      max_ = log_value;
    }
  }
  double value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out(points);
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = lo + h * i;
  out.back() = hi;
  return out;
}

std::vector<double> log_trapezoid_weights(double lo, double hi, int points) {
  const double h = (hi - lo) / (points - 1);
  std::vector<double> w(points, std::log(h));
  w.front() = w.back() = std::log(0.5 * h);
  return w;
}

}  // namespace

void QuadratureGrid::validate() const {
  if (beta_range.size() != beta_points.size()) throw InputError("grid: beta_range/beta_points length mismatch");
  for (std::size_t i = 0; i < beta_range.size(); ++i) {
    const auto [lo, hi] = beta_range[i];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw InputError("grid: beta range must be finite and ordered");
    if (beta_points[i] < 41) throw InputError("grid: at least 41 points per beta coordinate");
  }
  const auto [lo, hi] = sigma2_range;
  if (!(lo > 0.0) || !std::isfinite(hi) || !(lo < hi)) throw InputError("grid: sigma2 range must be positive, finite and ordered");
  if (sigma2_points < 41) throw InputError("grid: at least 41 sigma2 points");
}

QuadratureGrid default_grid(const Dataset& data, const Model& model, const Hyperparameters& hyper, int beta_points,
                            int sigma2_points) {
  hyper.validate();
  boost::math::inverse_gamma_distribution<double> prior(hyper.a0, hyper.b0);
  double lo = std::log(boost::math::quantile(prior, 0.0005));
  double hi = std::log(boost::math::quantile(prior, 0.9995));

  // Data can only move the sigma^2 scale within [b0, b0 + y'y/2] / (a0 + n/2).
  const double shape = hyper.a0 + 0.5 * data.n();
  lo = std::min(lo, std::log(hyper.b0 / shape));
  hi = std::max(hi, std::log((hyper.b0 + 0.5 * data.y.squaredNorm()) / shape));

  const double width = hi - lo;
  QuadratureGrid g;
  g.sigma2_range = {std::exp(lo - width), std::exp(hi + std::max(width, 12.0))};
  g.sigma2_points = sigma2_points;
  g.beta_range.assign(model.size(), {-8.0, 8.0});
  g.beta_points.assign(model.size(), beta_points);
  return g;
}

QuadratureGrid refined(const QuadratureGrid& grid) {
  QuadratureGrid g = grid;
  for (int& p : g.beta_points) p = 2 * p - 1;
  g.sigma2_points = 2 * g.sigma2_points - 1;
  return g;
}

double quadrature_posterior_sigma2(const Dataset& data, const Model& model, const Hyperparameters& hyper,
                                   const QuadratureGrid& grid) {
  data.validate();
  grid.validate();
  const int p = model.size();
  const int n = data.n();
  if (p > 2) throw InputError("quadrature supports at most 2 covariates");
  if (n < 1) throw InputError("quadrature needs at least one observation");
  if (!(hyper.gamma > 0.0)) throw InputError("quadrature needs a proper prior (gamma > 0)");
  if (static_cast<int>(grid.beta_range.size()) != p) throw InputError("grid dimension must equal |J|");
  if (model.max_index() > data.k()) throw InputError("model uses a covariate beyond k");
  hyper.validate();

  // Truncation guard.
  boost::math::inverse_gamma_distribution<double> prior(hyper.a0, hyper.b0);
  const double sigma_mass =
      boost::math::cdf(prior, grid.sigma2_range.second) - boost::math::cdf(prior, grid.sigma2_range.first);
  boost::math::normal_distribution<double> std_normal;
  double beta_mass = 1.0;
  for (const auto& [lo, hi] : grid.beta_range) beta_mass *= boost::math::cdf(std_normal, hi) - boost::math::cdf(std_normal, lo);
  if (sigma_mass < kMinMass || beta_mass < kMinMass) throw NumericError("grid truncation");

  MatrixXd xj(n, p);
  for (int i = 0; i < p; ++i) xj.col(i) = data.X.col(model.indices()[i] - 1);
  const double lambda = hyper.gamma * p;

  // Grid placement: principal axes of X_J'X_J + lambda I, centred on its normal-equation solution.
  MatrixXd a = xj.transpose() * xj;
  a.diagonal().array() += lambda;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a);
  const VectorXd evals = eig.eigenvalues();
  if (evals.minCoeff() <= 0.0) throw NumericError("singular design");
  const MatrixXd axes = eig.eigenvectors() * evals.cwiseInverse().cwiseSqrt().asDiagonal();
  const VectorXd centre = eig.eigenvectors() * (evals.cwiseInverse().asDiagonal() *
                                                (eig.eigenvectors().transpose() * (xj.transpose() * data.y)));
  const double log_det_axes = -0.5 * evals.array().log().sum();

  std::vector<std::vector<double>> nodes(p), log_w(p);
  for (int i = 0; i < p; ++i) {
    nodes[i] = linspace(grid.beta_range[i].first, grid.beta_range[i].second, grid.beta_points[i]);
    log_w[i] = log_trapezoid_weights(grid.beta_range[i].first, grid.beta_range[i].second, grid.beta_points[i]);
  }
  const double t_lo = std::log(grid.sigma2_range.first);
  const double t_hi = std::log(grid.sigma2_range.second);
  const auto t_nodes = linspace(t_lo, t_hi, grid.sigma2_points);
  const auto t_log_w = log_trapezoid_weights(t_lo, t_hi, grid.sigma2_points);

  const double log_2pi = std::log(2.0 * std::numbers::pi);
  const double log_prior_const = hyper.a0 * std::log(hyper.b0) - std::lgamma(hyper.a0) + 0.5 * p * (std::log(lambda) - log_2pi);

  LogSum numerator, denominator;
  const int n0 = grid.beta_points[0];
  const int n1 = p == 2 ? grid.beta_points[1] : 1;
  VectorXd beta(p), u(p), resid(n);
  for (int it = 0; it < grid.sigma2_points; ++it) {
    const double t = t_nodes[it];
    const double s2 = std::exp(t);
    const double s = std::exp(0.5 * t);
    // Gaussian likelihood and NIG prior normalisers, plus the Jacobians of
    // beta = centre + s * axes * u and sigma^2 = exp(t).
    const double log_slice = -0.5 * n * (log_2pi + t) + log_prior_const - 0.5 * p * t - (hyper.a0 + 1.0) * t -
                             hyper.b0 / s2 + p * 0.5 * t + log_det_axes + t + t_log_w[it];
    for (int i0 = 0; i0 < n0; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        u(0) = nodes[0][i0];
        double lw = log_w[0][i0];
        if (p == 2) {
          u(1) = nodes[1][i1];
          lw += log_w[1][i1];
        }
        beta.noalias() = centre + s * (axes * u);
        resid.noalias() = data.y - xj * beta;
        const double quad = resid.squaredNorm() + lambda * beta.squaredNorm();
        const double log_f = log_slice + lw - quad / (2.0 * s2);
        denominator.add(log_f);
        numerator.add(log_f + t);
      }
    }
  }
  return std::exp(numerator.value() - denominator.value());
}

MonteCarloEstimate mc_marginal_loss(const AgentPrior& agent, int n, long reps, const Seed& seed, unsigned threads) {
  if (reps < 1) throw InputError("mc_marginal_loss: reps must be >= 1");
  if (n < 0) throw InputError("mc_marginal_loss: n must be nonnegative");
  agent.hyper.validate();
  if (!(agent.hyper.gamma > 0.0)) throw InputError("mc_marginal_loss: prior draws need gamma > 0");
  const int p = agent.model.size();

  AgentPrior own = agent;
  own.model = Model::full(p);
  own.known_sigma_sq.reset();
  if (own.assumed_xx.rows() != p) own.assumed_xx = MatrixXd::Identity(p, p);

  const double beta_scale = 1.0 / std::sqrt(agent.hyper.gamma * p);
  std::vector<double> losses(static_cast<std::size_t>(reps));
  parallel_for(losses.size(), threads, [&](std::size_t r) {
    Engine rng = make_engine(seed.with_rep(r).with_stream(streams::prior_draw));
    std::gamma_distribution<double> precision(agent.hyper.a0, 1.0 / agent.hyper.b0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s2 = 1.0 / precision(rng);
    const double s = std::sqrt(s2);
    VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = s * beta_scale * normal(rng);
    Dataset d;
    d.X.resize(n, p);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) d.X(i, j) = normal(rng);
      d.y(i) = d.X.row(i).dot(beta) + s * normal(rng);
    }
    losses[r] = posterior_loss(d, own).total;
  });

  CompensatedSum sum;
  for (double v : losses) sum.add(v);
  MonteCarloEstimate est;
  est.reps = reps;
  est.mean = sum.value() / reps;
  CompensatedSum sq;
  for (double v : losses) sq.add((v - est.mean) * (v - est.mean));
  est.std_error = reps > 1 ? std::sqrt(sq.value() / (reps - 1) / reps) : 0.0;
  return est;
}

}  // namespace modcomp::oracle
