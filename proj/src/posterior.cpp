#include "modcomp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "modcomp/error.hpp"

namespace modcomp {

namespace {

// Relative pivot floor below which an unpenalised Gram matrix counts as singular.
constexpr double kSingularPivot = 1e-10;

std::vector<int> columns_of(const Model& model, int k) {
  if (model.empty()) throw InputError("model: at least one covariate is required");
  if (model.max_index() > k)
    throw InputError("model " + model.label() + " uses a covariate beyond k=" + std::to_string(k));
  std::vector<int> cols;
  cols.reserve(model.size());
  for (int j : model.indices()) cols.push_back(j - 1);
  return cols;
}

// X_J'X_J + gamma |J| I, factorised.
struct PenalizedGram {
  MatrixXd matrix;
  Eigen::LLT<MatrixXd> llt;
  VectorXd xty;

  PenalizedGram(const DesignMoments& m, const Model& model, double gamma) {
    if (!(gamma >= 0.0)) throw InputError("gamma must be nonnegative");
    const auto cols = columns_of(model, m.k());
    const int p = static_cast<int>(cols.size());
    matrix = m.xtx(cols, cols);
    xty = m.xty(cols);
    const double lambda = gamma * p;
    matrix.diagonal().array() += lambda;
    llt.compute(matrix);
    bool ok = llt.info() == Eigen::Success;
    if (ok && lambda == 0.0) {
      const VectorXd pivots = MatrixXd(llt.matrixL()).diagonal().array().square();
      const double scale = matrix.diagonal().maxCoeff();
      ok = scale > 0.0 && pivots.minCoeff() > kSingularPivot * scale;
    }
    if (!ok) throw NumericError("singular design");
  }

  double trace_inverse_times(const MatrixXd& assumed_xx) const {
    if (assumed_xx.rows() != matrix.rows() || assumed_xx.cols() != matrix.rows())
      throw InputError("assumed_xx must be |J| x |J|");
    return llt.solve(assumed_xx).trace();
  }
};

}  // namespace

DesignMoments DesignMoments::of(const Dataset& data) {
  data.validate();
  DesignMoments m;
  m.n = data.n();
  const int k = data.k();
  m.xtx = MatrixXd::Zero(k, k);
  m.xtx.selfadjointView<Eigen::Lower>().rankUpdate(data.X.transpose());
  m.xtx = m.xtx.selfadjointView<Eigen::Lower>();
  m.xty = data.X.transpose() * data.y;
  m.yty = data.y.squaredNorm();
  return m;
}

VectorXd ridge_estimate(const DesignMoments& moments, const Model& model, double gamma) {
  PenalizedGram gram(moments, model, gamma);
  return gram.llt.solve(gram.xty);
}

VectorXd ridge_estimate(const Dataset& data, const Model& model, double gamma) {
  return ridge_estimate(DesignMoments::of(data), model, gamma);
}

PosteriorSummary posterior_summary(const DesignMoments& moments, const AgentPrior& agent) {
  const Hyperparameters& h = agent.hyper;
  const int n = moments.n;
  if (!agent.known_sigma_sq) {
    if (!(h.b0 > 0.0)) throw InputError("hyper: b0 must be positive");
    if (!(h.a0 + 0.5 * n > 1.0)) throw InputError("posterior mean undefined");
  }
  if (n == 0 && h.gamma == 0.0) throw InputError("improper prior has no loss");

  PenalizedGram gram(moments, agent.model, h.gamma);
  PosteriorSummary s;
  s.n = n;
  s.ridge_beta = gram.llt.solve(gram.xty);
  // y'y - b'(X'X + lambda I) b with b solving the normal equations.
  s.penalized_rss = std::max(0.0, moments.yty - s.ridge_beta.dot(gram.xty));
  if (agent.known_sigma_sq)
    s.sigma2_mean = *agent.known_sigma_sq;
  else
    s.sigma2_mean = (2.0 * h.b0 + s.penalized_rss) / (2.0 * h.a0 + n - 2.0);
  s.precision_inverse = gram.llt.solve(MatrixXd::Identity(agent.model.size(), agent.model.size()));
  return s;
}

PosteriorSummary posterior_summary(const Dataset& data, const AgentPrior& agent) {
  return posterior_summary(DesignMoments::of(data), agent);
}

double uncertainty_trace(const DesignMoments& moments, const Model& model, double gamma, const MatrixXd& assumed_xx) {
  if (moments.n == 0 && gamma == 0.0) throw InputError("improper prior has no loss");
  return PenalizedGram(moments, model, gamma).trace_inverse_times(assumed_xx);
}

double posterior_loss_known_variance(const DesignMoments& moments, const Model& model, double gamma,
                                     double sigma_sq, const MatrixXd& assumed_xx) {
  if (!(sigma_sq > 0.0)) throw InputError("known variance must be positive");
  if (moments.n == 0 && gamma == 0.0) throw InputError("improper prior has no loss");
  PenalizedGram gram(moments, model, gamma);
  return sigma_sq + sigma_sq * gram.trace_inverse_times(assumed_xx);
}

double posterior_loss_known_variance(const Dataset& data, const Model& model, double gamma, double sigma_sq,
                                     const MatrixXd& assumed_xx) {
  return posterior_loss_known_variance(DesignMoments::of(data), model, gamma, sigma_sq, assumed_xx);
}

LossReport posterior_loss(const DesignMoments& moments, const AgentPrior& agent) {
  LossReport r;
  if (agent.known_sigma_sq) {
    const double s2 = *agent.known_sigma_sq;
    r.total = posterior_loss_known_variance(moments, agent.model, agent.hyper.gamma, s2, agent.assumed_xx);
    r.model_fit = s2;
    r.estimation_uncertainty = r.total - s2;
    return r;
  }
  const PosteriorSummary s = posterior_summary(moments, agent);
  if (agent.assumed_xx.rows() != agent.model.size() || agent.assumed_xx.cols() != agent.model.size())
    throw InputError("assumed_xx must be |J| x |J|");
  r.model_fit = s.sigma2_mean;
  r.estimation_uncertainty = s.sigma2_mean * (s.precision_inverse * agent.assumed_xx).trace();
  r.total = r.model_fit + r.estimation_uncertainty;
  return r;
}

LossReport posterior_loss(const Dataset& data, const AgentPrior& agent) {
  return posterior_loss(DesignMoments::of(data), agent);
}

double bayes_predict(const PosteriorSummary& summary, const Model& model, const VectorXd& x) {
  if (model.max_index() > x.size()) throw InputError("bayes_predict: x shorter than the model's covariates");
  if (summary.ridge_beta.size() != model.size()) throw InputError("bayes_predict: summary/model size mismatch");
  double out = 0.0;
  for (int i = 0; i < model.size(); ++i) out += x(model.indices()[i] - 1) * summary.ridge_beta(i);
  return out;
}

double exante_expected_loss(const AgentPrior& agent, int n) {
  const int p = agent.model.size();
  if (n <= p + 1) throw InputError("inverse-Wishart mean undefined");
  double prior_mean = 0.0;
  if (agent.known_sigma_sq) {
    prior_mean = *agent.known_sigma_sq;
  } else {
    agent.hyper.validate();
    prior_mean = agent.hyper.b0 / (agent.hyper.a0 - 1.0);
  }
  return prior_mean * (1.0 + static_cast<double>(p) / (n - p - 1));
}

}  // namespace modcomp
