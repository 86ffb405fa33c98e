#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "modcomp/competition.hpp"
#include "modcomp/dgp.hpp"
#include "modcomp/experiment.hpp"
#include "modcomp/posterior.hpp"

namespace modcomp::io {

using nlohmann::json;

/// 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

// Dataset CSV: header y,x1,...,xk then one row per observation.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// DgpSpec JSON: {"k", "beta0", "sigma0_sq", "cov_x"} with cov_x row-major nested arrays.
json to_json(const DgpSpec& spec);
DgpSpec dgp_from_json(const json& j);

json to_json(const Hyperparameters& h);
Hyperparameters hyper_from_json(const json& j, const std::string& where = "hyper");

/** Roster JSON.
 *
 *   {"hyper": {...}, "all_subsets": true | "max_size": m | "agents": [
 *      {"model": [1,3], "label": "...", "hyper": {...}, "known_sigma_sq": s, "assumed_xx": [[...]]}]}
 *
 * "hyper" at the top level is the default for agents that omit it. `k` is only
 * needed for all_subsets / max_size rosters.
 */
AgentRoster roster_from_json(const json& j, int k);

json to_json(const Model& m);
json to_json(const LossReport& r, const Model& m);
json to_json(const CompetitionResult& r, const AgentRoster& roster);
json to_json(const AuctionOutcome& a);

/// ExperimentConfig JSON uses the struct's field names; n_values may be a list or {"from", "to", "step"}.
ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& c);

json to_json(const WinningRateTable& t);
WinningRateTable table_from_json(const json& j);
json to_json(const std::vector<NSummary>& s);

json load_json(const std::filesystem::path& path);

}  // namespace modcomp::io
