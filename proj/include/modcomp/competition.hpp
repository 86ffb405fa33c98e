#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modcomp/dgp.hpp"
#include "modcomp/model.hpp"
#include "modcomp/posterior.hpp"

namespace modcomp {

/// Relative gap under which two losses count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct AgentRoster {
  std::vector<AgentPrior> agents;
  std::vector<std::string> labels;

  /// Labels default to the model labels ("{1,3}").
  static AgentRoster from_agents(std::vector<AgentPrior> agents);
  /// One NIG agent per model, all sharing `hyper`.
  static AgentRoster shared(const std::vector<Model>& models, const Hyperparameters& hyper);
  /// One known-variance agent per model.
  static AgentRoster known_variance(const std::vector<Model>& models, double gamma, double sigma_sq);

  std::size_t size() const { return agents.size(); }
  /// Nonempty, one label per agent, labels unique.
  void validate() const;
};

struct CompetitionResult {
  /// NaN for disqualified agents.
  std::vector<double> losses;
  std::vector<LossReport> reports;
  /// Error message for each agent that could not be evaluated on this dataset.
  std::vector<std::optional<std::string>> errors;
  int winner_index = -1;
  Model winner_model;
  bool tie = false;
  /// True when the tied agents have different model sizes.
  bool tie_across_sizes = false;
  /// Second-lowest minus lowest loss (0 with a single qualified agent).
  double margin = 0.0;

  int disqualified() const;
};

struct AuctionOutcome {
  std::vector<double> bids;
  int winner_index = -1;
  double price = 0.0;
  double lump_sum = 0.0;
  /// Single bidder: the price is its own bid.
  bool degenerate = false;
  bool tie = false;
};

/** All nonempty subsets of {1..k} with at most max_size elements, ordered by
 * (size, lexicographic). Throws InputError("roster too large") for k > 20.
 */
std::vector<Model> enumerate_models(int k, std::optional<int> max_size = std::nullopt);

/** Evaluates every agent's posterior loss on the dataset and selects the lowest.
 *
 * Ties (relative gap <= kTieTolerance) are broken by smallest |J|, then
 * lexicographic J, then roster order. Agents whose loss cannot be computed are
 * disqualified and their message recorded; if none remain a NumericError is
 * thrown naming every agent.
 */
CompetitionResult run_competition(const Dataset& data, const AgentRoster& roster);
CompetitionResult run_competition(const DesignMoments& moments, const AgentRoster& roster);

/// Sealed-bid second-price auction with bids M - L*; the winner always matches run_competition.
AuctionOutcome run_auction(const Dataset& data, const AgentRoster& roster, double lump_sum);
AuctionOutcome auction_from(const CompetitionResult& result, double lump_sum);

}  // namespace modcomp
