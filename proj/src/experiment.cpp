#include "modcomp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "modcomp/asymptotics.hpp"
#include "modcomp/error.hpp"
#include "modcomp/io.hpp"
#include "modcomp/parallel.hpp"

namespace modcomp {

std::vector<Model> RosterSpec::resolve(int k) const {
  switch (kind) {
    case Kind::all_subsets: return enumerate_models(k);
    case Kind::max_size: return enumerate_models(k, max_size);
    case Kind::explicit_list:
      for (const auto& m : models)
        if (m.max_index() > k) throw InputError("roster_spec: model " + m.label() + " exceeds k");
      return models;
  }
  return {};
}

ExperimentConfig ExperimentConfig::baseline(long reps) {
  ExperimentConfig c;
  c.k = 6;
  c.relevant = {1, 2, 3, 4, 5};
  c.hyper = {2.0, 1.0, 0.001};
  c.n_values.resize(50);
  for (int i = 0; i < 50; ++i) c.n_values[i] = i + 1;
  c.reps = reps;
  return c;
}

void ExperimentConfig::validate() const {
  if (k < 1) throw InputError("k: must be positive");
  if (k > 20) throw InputError("k: roster too large");
  if (relevant.empty()) throw InputError("relevant: no relevant covariates");
  for (int j : relevant)
    if (j < 1 || j > k) throw InputError("relevant: index outside 1..k");
  if (!(sigma0_sq >= 0.0)) throw InputError("sigma0_sq: must be nonnegative");
  if (!std::holds_alternative<KnownVarianceVariant>(variant)) {
    try {
      hyper.validate();
    } catch (const InputError& e) {
      throw InputError(std::string("hyper: ") + e.what());
    }
  }
  if (reps < 1) throw InputError("reps: must be >= 1");
  if (n_values.empty()) throw InputError("n_values: must be nonempty");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 0) throw InputError("n_values: must be nonnegative");
    if (i && n_values[i] <= n_values[i - 1]) throw InputError("n_values: must be strictly increasing");
  }
  if (roster.kind == RosterSpec::Kind::max_size && roster.max_size < 1) throw InputError("roster_spec: max_size must be >= 1");
  if (roster.kind == RosterSpec::Kind::explicit_list && roster.models.empty()) throw InputError("roster_spec: empty model list");
  if (const auto* kv = std::get_if<KnownVarianceVariant>(&variant); kv && !(kv->sigma_sq > 0.0))
    throw InputError("variant: known variance must be positive");
  if (const auto* dp = std::get_if<DriftingPriorVariant>(&variant)) {
    if (!(dp->exponent > 2.0)) throw InputError("variant: schedule not in omega(n^2)");
    if (!(dp->c > 0.0)) throw InputError("variant: drifting prior c must be positive");
  }
  if (const auto* bs = std::get_if<B0SweepVariant>(&variant)) {
    if (bs->b0_values.empty()) throw InputError("variant: b0_sweep needs at least one value");
    for (double b : bs->b0_values)
      if (!(b > 0.0)) throw InputError("variant: b0 values must be positive");
  }
}

const RateBlock& WinningRateTable::at(int n) const {
  for (const auto& b : blocks)
    if (b.n == n) return b;
  throw InputError("no block for n=" + std::to_string(n));
}

namespace {

struct RepOutcome {
  bool failed = false;
  Model winner;
  int disqualified = 0;
  bool tie = false;
  bool tie_across_sizes = false;
  double margin = 0.0;
  bool contains_true = false;
  bool exact_true = false;
};

AgentRoster build_roster(const ExperimentConfig& c, const std::vector<Model>& models, int n, std::optional<double> b0) {
  return std::visit(
      [&](const auto& v) -> AgentRoster {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, KnownVarianceVariant>) {
          return AgentRoster::known_variance(models, c.hyper.gamma, v.sigma_sq);
        } else if constexpr (std::is_same_v<V, DriftingPriorVariant>) {
          return AgentRoster::shared(models, drifting_prior_schedule(std::max(n, 1), v.c, v.exponent, c.hyper));
        } else {
          Hyperparameters h = c.hyper;
          if (b0) h.b0 = *b0;
          return AgentRoster::shared(models, h);
        }
      },
      c.variant);
}

RateBlock aggregate(int n, std::optional<double> b0, const std::vector<RepOutcome>& outcomes, const Model& truth) {
  RateBlock b;
  b.n = n;
  b.b0 = b0;
  b.reps = static_cast<long>(outcomes.size());
  long ok = 0, counted = 0, contains = 0, exact = 0, smaller = 0, ties = 0;
  std::map<int, long> sizes;
  std::map<Model, long> models;
  for (const auto& o : outcomes) {
    b.disqualified_agents += o.disqualified;
    if (o.failed) {
      ++b.failed;
      continue;
    }
    ++ok;
    contains += o.contains_true;
    exact += o.exact_true;
    smaller += o.winner.size() < truth.size();
    ties += o.tie;
    if (o.tie_across_sizes) {
      ++b.excluded_ties;
      continue;
    }
    ++counted;
    ++sizes[o.winner.size()];
    ++models[o.winner];
  }
  if (ok > 0) {
    b.freq_contains_true = static_cast<double>(contains) / ok;
    b.freq_exact_true = static_cast<double>(exact) / ok;
    b.freq_strictly_smaller = static_cast<double>(smaller) / ok;
    b.tie_rate = static_cast<double>(ties) / ok;
  }
  for (const auto& [size, count] : sizes) b.size_frequency[size] = static_cast<double>(count) / counted;
  for (const auto& [model, count] : models) b.model_frequency[model.label()] = static_cast<double>(count) / counted;
  return b;
}

}  // namespace

WinningRateTable run_sweep(const ExperimentConfig& config, std::vector<ReplicationRecord>* records,
                           const ProgressFn& progress) {
  config.validate();
  const std::vector<Model> models = config.roster.resolve(config.k);
  std::vector<int> relevant = config.relevant;
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
  const Model truth(relevant);
  const unsigned threads = config.threads ? config.threads : default_threads();

  std::vector<std::optional<double>> sweeps{std::nullopt};
  if (const auto* bs = std::get_if<B0SweepVariant>(&config.variant)) {
    sweeps.clear();
    for (double b : bs->b0_values) sweeps.emplace_back(b);
  }

  const Seed root{config.base_seed};
  std::optional<DgpSpec> fixed;
  if (!config.redraw_beta)
    fixed = sample_dgp(config.k, config.relevant, root.with_stream(streams::coefficients), config.sigma0_sq);

  WinningRateTable table;
  table.true_model = truth.indices();
  table.redraw_beta = config.redraw_beta;

  for (std::size_t s = 0; s < sweeps.size(); ++s) {
    for (int n : config.n_values) {
      const AgentRoster roster = build_roster(config, models, n, sweeps[s]);
      std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.reps));
      parallel_for(outcomes.size(), threads, [&](std::size_t r) {
        const Seed rep_seed = root.with_n(n).with_rep(r);
        const DgpSpec spec =
            fixed ? *fixed
                  : sample_dgp(config.k, config.relevant, rep_seed.with_stream(streams::coefficients), config.sigma0_sq);
        const Dataset data = sample_dataset(spec, n, rep_seed.with_stream(streams::data));
        const Model rep_truth(true_model(spec));
        RepOutcome& o = outcomes[r];
        try {
          const CompetitionResult res = run_competition(data, roster);
          o.winner = res.winner_model;
          o.disqualified = res.disqualified();
          o.tie = res.tie;
          o.tie_across_sizes = res.tie_across_sizes;
          o.margin = res.margin;
          o.contains_true = o.winner.includes(rep_truth);
          o.exact_true = o.winner == rep_truth;
        } catch (const NumericError&) {
          o.failed = true;
          o.disqualified = static_cast<int>(roster.size());
        }
      });
      table.blocks.push_back(aggregate(n, sweeps[s], outcomes, truth));
      if (records) {
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
          const auto& o = outcomes[r];
          records->push_back(ReplicationRecord{sweeps[s], n, static_cast<long>(r), o.failed ? "" : o.winner.label(),
                                               o.failed ? 0 : o.winner.size(), o.margin, o.tie, o.failed});
        }
      }
      if (progress) progress(table.blocks.back());
    }
  }
  return table;
}

std::vector<NSummary> summarize(const WinningRateTable& table) {
  std::vector<NSummary> out;
  for (const auto& b : table.blocks) {
    NSummary s;
    s.n = b.n;
    s.b0 = b.b0;
    s.contains_true = b.freq_contains_true;
    s.excludes_true = 1.0 - b.freq_contains_true;
    s.exact_true = b.freq_exact_true;
    s.strictly_smaller = b.freq_strictly_smaller;
    s.tie_rate = b.tie_rate;
    // Model order breaks equal frequencies: smallest model first.
    std::optional<Model> best;
    for (const auto& [label, f] : b.model_frequency) {
      const Model m = parse_model(label);
      if (!best || f > s.modal_frequency || (f == s.modal_frequency && m < *best)) {
        best = m;
        s.modal_frequency = f;
      }
    }
    if (best) {
      s.modal_winner = best->label();
      s.modal_size = best->size();
    }
    out.push_back(std::move(s));
  }
  return out;
}

EmitFormat parse_emit_format(const std::string& name) {
  if (name == "csv") return EmitFormat::csv;
  if (name == "json") return EmitFormat::json;
  throw InputError("format: expected csv or json, got '" + name + "'");
}

namespace {

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix + path.extension().string());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path, std::string& header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::getline(in, header);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else cell += ch;
    }
    cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

const std::vector<std::pair<std::string, double RateBlock::*>> kFreqMetrics{
    {"freq_contains_true", &RateBlock::freq_contains_true},
    {"freq_exact_true", &RateBlock::freq_exact_true},
    {"freq_strictly_smaller", &RateBlock::freq_strictly_smaller},
    {"tie_rate", &RateBlock::tie_rate},
};
const std::vector<std::pair<std::string, long RateBlock::*>> kCountMetrics{
    {"reps", &RateBlock::reps},
    {"failed", &RateBlock::failed},
    {"disqualified_agents", &RateBlock::disqualified_agents},
    {"excluded_ties", &RateBlock::excluded_ties},
};

}  // namespace

void emit(const WinningRateTable& table, EmitFormat format, const std::filesystem::path& path) {
  if (format == EmitFormat::json) {
    auto out = open_out(path);
    out << io::to_json(table).dump(2) << '\n';
    if (!out) throw InputError("write failed: " + path.string());
    return;
  }
  const bool sweep = !table.blocks.empty() && table.blocks.front().b0.has_value();
  auto key = [&](const RateBlock& b) {
    return (sweep ? io::format_number(*b.b0) + "," : std::string()) + std::to_string(b.n);
  };
  const std::string lead = sweep ? "b0,n" : "n";

  auto sizes = open_out(path);
  sizes << lead << ",winner_size,frequency\n";
  for (const auto& b : table.blocks)
    for (const auto& [size, f] : b.size_frequency) sizes << key(b) << ',' << size << ',' << io::format_number(f) << '\n';

  const auto metrics_path = sibling(path, "_metrics");
  auto metrics = open_out(metrics_path);
  metrics << lead << ",metric,value\n";
  for (const auto& b : table.blocks) {
    for (const auto& [name, field] : kCountMetrics) metrics << key(b) << ',' << name << ',' << b.*field << '\n';
    for (const auto& [name, field] : kFreqMetrics) metrics << key(b) << ',' << name << ',' << io::format_number(b.*field) << '\n';
    metrics << key(b) << ",freq_excludes_true," << io::format_number(1.0 - b.freq_contains_true) << '\n';
  }

  const auto models_path = sibling(path, "_models");
  auto models = open_out(models_path);
  models << lead << ",winner_model,frequency\n";
  for (const auto& b : table.blocks)
    for (const auto& [label, f] : b.model_frequency) models << key(b) << ",\"" << label << "\"," << io::format_number(f) << '\n';

  if (!sizes || !metrics || !models) throw InputError("write failed near " + path.string());
}

WinningRateTable load_table(const std::filesystem::path& path, EmitFormat format) {
  if (format == EmitFormat::json) return io::table_from_json(io::load_json(path));

  WinningRateTable table;
  std::map<std::pair<double, int>, RateBlock> blocks;
  std::vector<std::pair<double, int>> order;
  std::string header;
  const auto size_rows = read_csv_rows(path, header);
  const bool sweep = header.rfind("b0,", 0) == 0;
  const std::size_t off = sweep ? 1 : 0;
  auto block_for = [&](const std::vector<std::string>& row) -> RateBlock& {
    if (row.size() != off + 3) throw InputError("malformed row in winning-rate CSV");
    const double b0 = sweep ? std::stod(row[0]) : 0.0;
    const int n = std::stoi(row[off]);
    auto [it, inserted] = blocks.try_emplace({b0, n});
    if (inserted) {
      it->second.n = n;
      if (sweep) it->second.b0 = b0;
      order.emplace_back(b0, n);
    }
    return it->second;
  };
  for (const auto& row : read_csv_rows(sibling(path, "_metrics"), header)) {
    RateBlock& b = block_for(row);
    const std::string& name = row[off + 1];
    for (const auto& [metric, field] : kCountMetrics)
      if (name == metric) b.*field = std::stol(row[off + 2]);
    for (const auto& [metric, field] : kFreqMetrics)
      if (name == metric) b.*field = std::stod(row[off + 2]);
  }
  for (const auto& row : size_rows) block_for(row).size_frequency[std::stoi(row[off + 1])] = std::stod(row[off + 2]);
  for (const auto& row : read_csv_rows(sibling(path, "_models"), header))
    block_for(row).model_frequency[row[off + 1]] = std::stod(row[off + 2]);
  for (const auto& k : order) table.blocks.push_back(blocks.at(k));
  return table;
}

void write_records_csv(const std::vector<ReplicationRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "b0,n,rep,winner,winner_size,margin,tie,failed\n";
  for (const auto& r : records)
    out << (r.b0 ? io::format_number(*r.b0) : "") << ',' << r.n << ',' << r.rep << ",\"" << r.winner << "\","
        << r.winner_size << ',' << io::format_number(r.margin) << ',' << r.tie << ',' << r.failed << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace modcomp
