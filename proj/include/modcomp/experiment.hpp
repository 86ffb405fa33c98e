#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modcomp/competition.hpp"
#include "modcomp/model.hpp"

namespace modcomp {

/// Which agents compete in every replication.
struct RosterSpec {
  enum class Kind { all_subsets, max_size, explicit_list };
  Kind kind = Kind::all_subsets;
  int max_size = 0;
  std::vector<Model> models;

  std::vector<Model> resolve(int k) const;
};

struct StandardVariant {};
/// Agents know the noise variance (point-mass prior at sigma_sq).
struct KnownVarianceVariant {
  double sigma_sq = 1.0;
};
/// b0 replaced by c * n^exponent at each sample size.
struct DriftingPriorVariant {
  double c = 1.0;
  double exponent = 2.5;
};
/// One sweep per b0 value, sharing datasets across values.
struct B0SweepVariant {
  std::vector<double> b0_values;
};
using Variant = std::variant<StandardVariant, KnownVarianceVariant, DriftingPriorVariant, B0SweepVariant>;

struct ExperimentConfig {
  int k = 6;
  std::vector<int> relevant{1, 2, 3, 4, 5};
  double sigma0_sq = 1.0;
  Hyperparameters hyper{2.0, 1.0, 0.001};
  std::vector<int> n_values;
  long reps = 1;
  std::uint64_t base_seed = 1;
  RosterSpec roster;
  Variant variant;
  /// Fresh beta0 in every replication; otherwise one beta0 drawn from base_seed.
  bool redraw_beta = true;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
  /// When set, one CSV row per replication is written here.
  std::optional<std::filesystem::path> raw_records;

  /// Standard winning-rate sweep: k = 6, J0 = {1..5}, (2, 1, 0.001), n = 1..50.
  static ExperimentConfig baseline(long reps = 5000);

  void validate() const;
};

/// Winner statistics for one (b0, n) cell.
struct RateBlock {
  int n = 0;
  /// Set only for b0 sweeps.
  std::optional<double> b0;
  long reps = 0;
  /// Replications in which every agent was disqualified.
  long failed = 0;
  /// Total agent disqualifications across replications.
  long disqualified_agents = 0;
  /// Replications whose tie spanned several model sizes; excluded from the size and model frequencies.
  long excluded_ties = 0;
  std::map<int, double> size_frequency;
  std::map<std::string, double> model_frequency;
  double freq_contains_true = 0.0;
  double freq_exact_true = 0.0;
  double freq_strictly_smaller = 0.0;
  double tie_rate = 0.0;

  friend bool operator==(const RateBlock&, const RateBlock&) = default;
};

struct WinningRateTable {
  std::vector<int> true_model;
  bool redraw_beta = true;
  std::vector<RateBlock> blocks;

  /// Block for sample size n (first sweep value for b0 sweeps).
  const RateBlock& at(int n) const;

  friend bool operator==(const WinningRateTable&, const WinningRateTable&) = default;
};

struct ReplicationRecord {
  std::optional<double> b0;
  int n = 0;
  long rep = 0;
  std::string winner;
  int winner_size = 0;
  double margin = 0.0;
  bool tie = false;
  bool failed = false;
};

using ProgressFn = std::function<void(const RateBlock&)>;

/** Replicated competitions for every n (and b0) in the config.
 *
 * Replication r at sample size n draws its data from Seed{base_seed, 0, n, r},
 * so the table is identical for any thread count or scheduling order.
 */
WinningRateTable run_sweep(const ExperimentConfig& config, std::vector<ReplicationRecord>* records = nullptr,
                           const ProgressFn& progress = {});

struct NSummary {
  int n = 0;
  std::optional<double> b0;
  double contains_true = 0.0;
  double excludes_true = 0.0;
  double exact_true = 0.0;
  double strictly_smaller = 0.0;
  double tie_rate = 0.0;
  std::string modal_winner;
  double modal_frequency = 0.0;
  int modal_size = 0;
};

std::vector<NSummary> summarize(const WinningRateTable& table);

enum class EmitFormat { csv, json };
EmitFormat parse_emit_format(const std::string& name);

/** Writes the table. CSV produces `path` (n,winner_size,frequency),
 * `<stem>_metrics.csv` (n,metric,value) and `<stem>_models.csv`
 * (n,winner_model,frequency); b0 sweeps prepend a b0 column. JSON writes one file.
 */
void emit(const WinningRateTable& table, EmitFormat format, const std::filesystem::path& path);
WinningRateTable load_table(const std::filesystem::path& path, EmitFormat format);

void write_records_csv(const std::vector<ReplicationRecord>& records, const std::filesystem::path& path);

}  // namespace modcomp
