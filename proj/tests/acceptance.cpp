// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "modcomp/asymptotics.hpp"
#include "modcomp/competition.hpp"
#include "modcomp/dgp.hpp"
#include "modcomp/experiment.hpp"
#include "modcomp/oracle.hpp"
#include "modcomp/parallel.hpp"
#include "modcomp/posterior.hpp"
#include "support.hpp"

using namespace modcomp;
using testing::rel_diff;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

char buf[512];

template <typename... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Outcome single_observation() {
  auto c = ExperimentConfig::baseline(1000);
  c.n_values = {1};
  const auto t = run_sweep(c);
  const auto& b = t.at(1);
  const double f1 = b.size_frequency.count(1) ? b.size_frequency.at(1) : 0.0;
  return {f1 == 1.0 && b.excluded_ties == 0 && b.failed == 0, fmt("freq(size 1) = %.4f over %ld reps", f1, b.reps)};
}

Outcome known_variance_subsets() {
  std::mt19937_64 rng(101);
  const int k = 6;
  const auto models = enumerate_models(k);
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 10;
    const auto d = testing::random_dataset(rng, n, k);
    const auto mom = DesignMoments::of(d);
    const double full = posterior_loss_known_variance(mom, Model::full(k), 0.001, 1.0, MatrixXd::Identity(k, k));
    for (int size = 1; size < k; ++size) {
      bool beaten = false;
      for (const auto& m : models)
        if (m.size() == size &&
            posterior_loss_known_variance(mom, m, 0.001, 1.0, MatrixXd::Identity(size, size)) < full)
          beaten = true;
      failures += !beaten;
    }
  }
  return {failures == 0, fmt("%d failures over 500 datasets x 5 sizes", failures)};
}

Outcome quadrature_agreement() {
  std::mt19937_64 rng(102);
  const Hyperparameters h{2.0, 1.0, 0.001};
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const auto d = testing::random_dataset(rng, n, 3);
    const Model m = trial % 2 ? Model({1 + trial % 3}) : Model({1, 2 + trial % 2});
    const double exact = posterior_summary(d, AgentPrior::nig(m, h)).sigma2_mean;
    const double quad = oracle::quadrature_posterior_sigma2(d, m, h, oracle::default_grid(d, m, h));
    worst = std::max(worst, rel_diff(quad, exact));
  }
  return {worst <= 1e-3, fmt("max relative error %.3g over 50 instances", worst)};
}

Outcome exante_monte_carlo() {
  const Hyperparameters h{3.0, 2.0, 1e-6};
  double est[3], worst = 0.0;
  for (int size = 1; size <= 3; ++size) {
    const auto agent = AgentPrior::nig(Model::full(size), h);
    const auto mc = oracle::mc_marginal_loss(agent, 10, 200000, Seed{103}.with_sweep(size), default_threads());
    est[size - 1] = mc.mean;
    worst = std::max(worst, rel_diff(mc.mean, exante_expected_loss(agent, 10)));
  }
  const bool order = est[0] < est[1] && est[0] < est[2];
  return {worst <= 0.02 && order,
          fmt("max relative gap %.4f; estimates %.4f %.4f %.4f", worst, est[0], est[1], est[2])};
}

Outcome prior_normalization() {
  Dataset empty;
  empty.X.resize(0, 6);
  empty.y.resize(0);
  const auto models = enumerate_models(6);
  const Hyperparameters h{2.0, 1.0, 0.001};
  const double ref = posterior_loss(empty, AgentPrior::nig(models[0], h)).total;
  double worst = 0.0;
  for (const auto& m : models) worst = std::max(worst, rel_diff(posterior_loss(empty, AgentPrior::nig(m, h)).total, ref));
  return {worst <= 1e-12 && models.size() == 63, fmt("max relative spread %.3g over %zu models", worst, models.size())};
}

Outcome winning_rate_shape() {
  const auto t = run_sweep(ExperimentConfig::baseline(2000));
  const auto& b1 = t.at(1);
  const auto& b5 = t.at(5);
  const auto& b50 = t.at(50);
  const double a = b1.size_frequency.count(1) ? b1.size_frequency.at(1) : 0.0;
  const double rise = b50.freq_contains_true - b5.freq_contains_true;
  auto freq = [&](const std::string& label) { return b50.model_frequency.count(label) ? b50.model_frequency.at(label) : 0.0; };
  const double exact = freq("{1,2,3,4,5}"), full = freq("{1,2,3,4,5,6}");
  const bool pass = a == 1.0 && rise >= 0.3 && exact + full >= 0.5 && full > 0.0;
  return {pass, fmt("(a) %.4f (b) %.4f - %.4f = %.4f (c) %.4f + %.4f = %.4f", a, b50.freq_contains_true,
                    b5.freq_contains_true, rise, exact, full, exact + full)};
}

Outcome vanishing_misspecification() {
  auto c = ExperimentConfig::baseline(500);
  c.n_values = {200, 800};
  c.redraw_beta = false;
  const auto t = run_sweep(c);
  const double e200 = 1.0 - t.at(200).freq_contains_true, e800 = 1.0 - t.at(800).freq_contains_true;
  return {e200 <= 0.10 && e800 <= 0.02, fmt("excludes a relevant covariate: %.4f at n=200, %.4f at n=800", e200, e800)};
}

Outcome drifting_prior() {
  auto c = ExperimentConfig::baseline(500);
  c.n_values = {200, 400, 800};
  c.variant = DriftingPriorVariant{1.0, 2.5};
  const auto t = run_sweep(c);
  double f[3];
  for (int i = 0; i < 3; ++i) {
    f[i] = 0.0;
    for (auto [size, freq] : t.blocks[i].size_frequency)
      if (size < 5) f[i] += freq;
  }
  const bool pass = f[0] <= f[1] && f[1] <= f[2] && f[2] >= 0.9;
  return {pass, fmt("freq(|J| < 5): %.4f %.4f %.4f", f[0], f[1], f[2])};
}

Outcome ktk_order() {
  const Hyperparameters h{2.0, 1.0, 0.001};
  const auto agent = AgentPrior::nig(Model({1}), h);
  const DgpSpec spec = DgpSpec::with_identity_covariates(VectorXd::Ones(1), 4.0);
  const int reps = 200;
  std::vector<double> ns, laplace, flipped;
  for (int n : {100, 200, 400, 800}) {
    double el = 0.0, ep = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto d = sample_dataset(spec, n, Seed{109}.with_n(n).with_rep(r));
      const double exact = posterior_summary(d, agent).sigma2_mean;
      const auto in = ktk_input(d, agent);
      el += std::abs(ktk_expansion_sigma2(in, KtkSign::laplace) - exact) / reps;
      ep += std::abs(ktk_expansion_sigma2(in, KtkSign::flipped) - exact) / reps;
    }
    ns.push_back(n);
    laplace.push_back(el);
    flipped.push_back(ep);
  }
  const double sl = testing::loglog_slope(ns, laplace), sp = testing::loglog_slope(ns, flipped);
  return {sl <= -1.5 && sp >= -1.2, fmt("slopes: laplace %.3f, wrong sign %.3f", sl, sp)};
}

Outcome identity_suite() {
  std::mt19937_64 rng(110);
  double log_form = 0.0, ridge = 0.0, aic_pen = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 20;
    const auto d = testing::random_dataset(rng, n, 6, 0.5 + trial % 3);
    std::vector<int> idx;
    for (int j = 1; j <= 6; ++j)
      if ((trial >> (j % 5)) % 2 || j == 1) idx.push_back(j);
    const Model m(idx);
    const Hyperparameters h{2.0 + trial % 3, 0.5 + trial % 4, 0.001 * (1 + trial % 5)};
    const MatrixXd x = testing::columns(d, m);
    const double lambda = h.gamma * m.size();
    const double pen_min = testing::penalized_min_by_qr(x, d.y, lambda);
    MatrixXd a = x.transpose() * x;
    a.diagonal().array() += lambda;
    const double trace = a.fullPivLu().inverse().trace();
    const double lhs = std::log((2.0 * h.b0 / n + pen_min / n) / (2.0 * h.a0 / n + 1.0 - 2.0 / n)) + std::log1p(trace);
    log_form = std::max(log_form, rel_diff(std::exp(lhs), posterior_loss(d, AgentPrior::nig(m, h)).total));

    const VectorXd b = ridge_estimate(d, m, h.gamma);
    ridge = std::max(ridge, rel_diff(d.y.squaredNorm() - b.dot(a * b), (d.y - x * b).squaredNorm() + lambda * b.squaredNorm()));

    if (n >= 8) {
      const Model small({1}), big({1, 2, 3});
      const double diff = (aic(d, big) - aic(d, small)) - (std::log(sigma2_mle(d, big)) - std::log(sigma2_mle(d, small)));
      aic_pen = std::max(aic_pen, std::abs(diff - 4.0 / n) / (4.0 / n));
    }
  }
  return {log_form <= 1e-10 && ridge <= 1e-10 && aic_pen <= 1e-12,
          fmt("log form %.3g, ridge identity %.3g, AIC penalty %.3g", log_form, ridge, aic_pen)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"single observation picks a singleton", single_observation},
      {"known variance: smaller models beat the full model", known_variance_subsets},
      {"conjugate posterior mean matches quadrature", quadrature_agreement},
      {"ex-ante loss matches Monte Carlo", exante_monte_carlo},
      {"prior losses agree across all models", prior_normalization},
      {"winning-rate curve shape", winning_rate_shape},
      {"misspecification vanishes with n", vanishing_misspecification},
      {"drifting prior favours small models", drifting_prior},
      {"Laplace expansion convergence order", ktk_order},
      {"exact identities", identity_suite},
  };
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s | %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed ? 1 : 0;
}
