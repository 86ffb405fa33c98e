#include "modcomp/competition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "modcomp/error.hpp"

namespace modcomp {

AgentRoster AgentRoster::from_agents(std::vector<AgentPrior> agents) {
  AgentRoster r;
  r.labels.reserve(agents.size());
  for (const auto& a : agents) r.labels.push_back(a.model.label());
  r.agents = std::move(agents);
  return r;
}

AgentRoster AgentRoster::shared(const std::vector<Model>& models, const Hyperparameters& hyper) {
  std::vector<AgentPrior> agents;
  agents.reserve(models.size());
  for (const auto& m : models) agents.push_back(AgentPrior::nig(m, hyper));
  return from_agents(std::move(agents));
}

AgentRoster AgentRoster::known_variance(const std::vector<Model>& models, double gamma, double sigma_sq) {
  std::vector<AgentPrior> agents;
  agents.reserve(models.size());
  for (const auto& m : models) agents.push_back(AgentPrior::known_variance(m, gamma, sigma_sq));
  return from_agents(std::move(agents));
}

void AgentRoster::validate() const {
  if (agents.empty()) throw InputError("roster: no agents");
  if (labels.size() != agents.size()) throw InputError("roster: one label per agent required");
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw InputError("roster: duplicate label " + l);
}

int CompetitionResult::disqualified() const {
  return static_cast<int>(std::count_if(errors.begin(), errors.end(), [](const auto& e) { return e.has_value(); }));
}

std::vector<Model> enumerate_models(int k, std::optional<int> max_size) {
  if (k < 1) throw InputError("enumerate_models: k must be positive");
  if (k > 20) throw InputError("roster too large");
  const int cap = max_size ? *max_size : k;
  if (cap < 1) throw InputError("enumerate_models: max_size must be positive");
  std::vector<Model> out;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    if (std::popcount(mask) > cap) continue;
    std::vector<int> idx;
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) idx.push_back(j + 1);
    out.emplace_back(std::move(idx));
  }
  std::sort(out.begin(), out.end());
  return out;
}

CompetitionResult run_competition(const DesignMoments& moments, const AgentRoster& roster) {
  roster.validate();
  const std::size_t m = roster.size();
  CompetitionResult res;
  res.losses.assign(m, std::numeric_limits<double>::quiet_NaN());
  res.reports.assign(m, LossReport{});
  res.errors.assign(m, std::nullopt);

  for (std::size_t i = 0; i < m; ++i) {
    try {
      res.reports[i] = posterior_loss(moments, roster.agents[i]);
      res.losses[i] = res.reports[i].total;
    } catch (const std::exception& e) {
      res.errors[i] = roster.labels[i] + ": " + e.what();
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    if (!res.errors[i]) best = std::min(best, res.losses[i]);
  if (!std::isfinite(best)) {
    std::string msg = "every agent was disqualified:";
    for (const auto& e : res.errors)
      if (e) msg += " [" + *e + "]";
    throw NumericError(msg);
  }

  const double tol = kTieTolerance * std::abs(best);
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < m; ++i)
    if (!res.errors[i] && res.losses[i] - best <= tol) tied.push_back(i);

  std::size_t winner = tied.front();
  for (std::size_t i : tied)
    if (roster.agents[i].model < roster.agents[winner].model) winner = i;
  res.winner_index = static_cast<int>(winner);
  res.winner_model = roster.agents[winner].model;
  res.tie = tied.size() > 1;
  for (std::size_t i : tied)
    if (roster.agents[i].model.size() != res.winner_model.size()) res.tie_across_sizes = true;

  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    if (!res.errors[i] && i != winner) second = std::min(second, res.losses[i]);
  res.margin = std::isfinite(second) ? std::max(0.0, second - res.losses[winner]) : 0.0;
  return res;
}

CompetitionResult run_competition(const Dataset& data, const AgentRoster& roster) {
  return run_competition(DesignMoments::of(data), roster);
}

AuctionOutcome auction_from(const CompetitionResult& result, double lump_sum) {
  AuctionOutcome out;
  out.lump_sum = lump_sum;
  out.winner_index = result.winner_index;
  out.tie = result.tie;
  out.bids.reserve(result.losses.size());
  for (double l : result.losses) out.bids.push_back(lump_sum - l);

  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.bids.size(); ++i)
    if (static_cast<int>(i) != out.winner_index && !result.errors[i]) second = std::max(second, out.bids[i]);
  if (std::isfinite(second)) {
    out.price = std::min(second, out.bids[out.winner_index]);
  } else {
    out.price = out.bids[out.winner_index];
    out.degenerate = true;
  }
  return out;
}

AuctionOutcome run_auction(const Dataset& data, const AgentRoster& roster, double lump_sum) {
  return auction_from(run_competition(data, roster), lump_sum);
}

}  // namespace modcomp
