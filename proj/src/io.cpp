#include "modcomp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "modcomp/error.hpp"

namespace modcomp::io {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& cell, int line) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError("dataset CSV line " + std::to_string(line) + ": bad number '" + cell + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

// Reads j[key] as T, naming the field on failure.
template <class T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + "." + key + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T field_or(const json& j, const std::string& key, const std::string& where, T fallback) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InputError(where + "." + key + ": unknown field");
}

MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected nested arrays");
  const auto rows = static_cast<int>(j.size());
  MatrixXd m(rows, rows);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != rows) throw InputError(where + ": expected a square matrix");
    for (int c = 0; c < rows; ++c) {
      if (!j[r][c].is_number()) throw InputError(where + ": entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Model model_from_json(const json& j, const std::string& where) {
  try {
    auto idx = j.get<std::vector<int>>();
    std::sort(idx.begin(), idx.end());
    return Model(std::move(idx));
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'y';
  for (int j = 1; j <= data.k(); ++j) out << ",x" << j;
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << format_number(data.y(i));
    for (int j = 0; j < data.k(); ++j) out << ',' << format_number(data.X(i, j));
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset CSV: missing header");
  const auto header = split(trim(line));
  if (header.size() < 2 || trim(header[0]) != "y") throw InputError("dataset CSV: header must be y,x1,...,xk");
  const int k = static_cast<int>(header.size()) - 1;
  for (int j = 1; j <= k; ++j)
    if (trim(header[j]) != "x" + std::to_string(j)) throw InputError("dataset CSV: header must be y,x1,...,xk");

  std::vector<double> ys, xs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != k + 1)
      throw InputError("dataset CSV line " + std::to_string(line_no) + ": expected " + std::to_string(k + 1) + " fields");
    ys.push_back(parse_double(cells[0], line_no));
    for (int j = 1; j <= k; ++j) xs.push_back(parse_double(cells[j], line_no));
  }
  Dataset d;
  const int n = static_cast<int>(ys.size());
  d.y = Eigen::Map<VectorXd>(ys.data(), n);
  d.X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(xs.data(), n, k);
  return d;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_dataset_csv(out, data);
  if (!out) throw InputError("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  try {
    return read_dataset_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

json to_json(const DgpSpec& spec) {
  return json{{"k", spec.k},
              {"beta0", std::vector<double>(spec.beta0.data(), spec.beta0.data() + spec.beta0.size())},
              {"sigma0_sq", spec.sigma0_sq},
              {"cov_x", matrix_to_json(spec.cov_x)}};
}

DgpSpec dgp_from_json(const json& j) {
  reject_unknown(j, {"k", "beta0", "sigma0_sq", "cov_x"}, "dgp");
  DgpSpec s;
  s.k = field<int>(j, "k", "dgp");
  const auto beta = field<std::vector<double>>(j, "beta0", "dgp");
  s.beta0 = Eigen::Map<const VectorXd>(beta.data(), static_cast<int>(beta.size()));
  s.sigma0_sq = field_or<double>(j, "sigma0_sq", "dgp", 1.0);
  s.cov_x = j.contains("cov_x") ? matrix_from_json(j.at("cov_x"), "dgp.cov_x") : MatrixXd::Identity(s.k, s.k);
  s.validate();
  return s;
}

json to_json(const Hyperparameters& h) { return json{{"a0", h.a0}, {"b0", h.b0}, {"gamma", h.gamma}}; }

Hyperparameters hyper_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"a0", "b0", "gamma"}, where);
  Hyperparameters h;
  h.a0 = field_or<double>(j, "a0", where, h.a0);
  h.b0 = field_or<double>(j, "b0", where, h.b0);
  h.gamma = field_or<double>(j, "gamma", where, h.gamma);
  h.validate();
  return h;
}

AgentRoster roster_from_json(const json& j, int k) {
  reject_unknown(j, {"hyper", "all_subsets", "max_size", "agents", "known_sigma_sq"}, "roster");
  const Hyperparameters shared = j.contains("hyper") ? hyper_from_json(j.at("hyper"), "roster.hyper") : Hyperparameters{};
  const auto known = j.contains("known_sigma_sq") ? std::optional(field<double>(j, "known_sigma_sq", "roster"))
                                                  : std::nullopt;
  const int modes = j.contains("all_subsets") + j.contains("max_size") + j.contains("agents");
  if (modes != 1) throw InputError("roster: exactly one of all_subsets, max_size, agents is required");

  std::vector<AgentPrior> agents;
  std::vector<std::string> labels;
  if (!j.contains("agents")) {
    if (j.contains("all_subsets") && !field<bool>(j, "all_subsets", "roster"))
      throw InputError("roster.all_subsets: must be true when present");
    const auto cap = j.contains("max_size") ? std::optional(field<int>(j, "max_size", "roster")) : std::nullopt;
    for (const auto& m : enumerate_models(k, cap)) {
      agents.push_back(AgentPrior::nig(m, shared));
      agents.back().known_sigma_sq = known;
      labels.push_back(m.label());
    }
  } else {
    const json& list = j.at("agents");
    if (!list.is_array() || list.empty()) throw InputError("roster.agents: expected a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "roster.agents[" + std::to_string(i) + "]";
      const json& a = list[i];
      reject_unknown(a, {"model", "label", "hyper", "known_sigma_sq", "assumed_xx"}, where);
      if (!a.contains("model")) throw InputError(where + ".model: missing");
      AgentPrior agent = AgentPrior::nig(model_from_json(a.at("model"), where + ".model"),
                                         a.contains("hyper") ? hyper_from_json(a.at("hyper"), where + ".hyper") : shared);
      agent.known_sigma_sq = a.contains("known_sigma_sq") ? std::optional(field<double>(a, "known_sigma_sq", where)) : known;
      if (a.contains("assumed_xx")) agent.assumed_xx = matrix_from_json(a.at("assumed_xx"), where + ".assumed_xx");
      try {
        agent.validate();
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
      labels.push_back(field_or<std::string>(a, "label", where, agent.model.label()));
      agents.push_back(std::move(agent));
    }
  }
  AgentRoster r;
  r.agents = std::move(agents);
  r.labels = std::move(labels);
  r.validate();
  return r;
}

json to_json(const Model& m) { return json(m.indices()); }

json to_json(const LossReport& r, const Model& m) {
  return json{{"model", to_json(m)},
              {"model_fit", r.model_fit},
              {"estimation_uncertainty", r.estimation_uncertainty},
              {"total", r.total}};
}

json to_json(const CompetitionResult& r, const AgentRoster& roster) {
  json agents = json::array();
  for (std::size_t i = 0; i < roster.size(); ++i) {
    json a = to_json(r.reports[i], roster.agents[i].model);
    a["label"] = roster.labels[i];
    if (r.errors[i]) {
      a["error"] = *r.errors[i];
      a["model_fit"] = a["estimation_uncertainty"] = a["total"] = nullptr;
    }
    agents.push_back(std::move(a));
  }
  return json{{"winner_index", r.winner_index},
              {"winner_label", roster.labels[r.winner_index]},
              {"winner_model", to_json(r.winner_model)},
              {"tie", r.tie},
              {"margin", r.margin},
              {"disqualified", r.disqualified()},
              {"agents", agents}};
}

json to_json(const AuctionOutcome& a) {
  return json{{"lump_sum", a.lump_sum}, {"bids", a.bids},         {"winner_index", a.winner_index},
              {"price", a.price},       {"tie", a.tie},           {"degenerate", a.degenerate}};
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"k", "relevant", "sigma0_sq", "hyper", "n_values", "reps", "base_seed", "roster_spec", "variant",
                  "redraw_beta", "threads", "raw_records"},
                 "config");
  ExperimentConfig c;
  c.k = field_or<int>(j, "k", "config", c.k);
  c.relevant = field_or<std::vector<int>>(j, "relevant", "config", c.relevant);
  c.sigma0_sq = field_or<double>(j, "sigma0_sq", "config", c.sigma0_sq);
  if (j.contains("hyper")) c.hyper = hyper_from_json(j.at("hyper"), "config.hyper");

  if (!j.contains("n_values")) throw InputError("config.n_values: missing");
  const json& nv = j.at("n_values");
  if (nv.is_object()) {
    reject_unknown(nv, {"from", "to", "step"}, "config.n_values");
    const int from = field<int>(nv, "from", "config.n_values");
    const int to = field<int>(nv, "to", "config.n_values");
    const int step = field_or<int>(nv, "step", "config.n_values", 1);
    if (step < 1) throw InputError("config.n_values.step: must be >= 1");
    c.n_values.clear();
    for (int n = from; n <= to; n += step) c.n_values.push_back(n);
  } else {
    c.n_values = field<std::vector<int>>(j, "n_values", "config");
  }
  c.reps = field_or<long>(j, "reps", "config", c.reps);
  c.base_seed = field_or<std::uint64_t>(j, "base_seed", "config", c.base_seed);
  c.redraw_beta = field_or<bool>(j, "redraw_beta", "config", c.redraw_beta);
  c.threads = field_or<unsigned>(j, "threads", "config", c.threads);
  if (j.contains("raw_records")) c.raw_records = field<std::string>(j, "raw_records", "config");

  if (j.contains("roster_spec")) {
    const json& r = j.at("roster_spec");
    if (r.is_string()) {
      if (r.get<std::string>() != "all_subsets") throw InputError("config.roster_spec: unknown roster '" + r.get<std::string>() + "'");
    } else {
      reject_unknown(r, {"max_size", "explicit"}, "config.roster_spec");
      if (r.contains("max_size")) {
        c.roster.kind = RosterSpec::Kind::max_size;
        c.roster.max_size = field<int>(r, "max_size", "config.roster_spec");
      } else if (r.contains("explicit")) {
        c.roster.kind = RosterSpec::Kind::explicit_list;
        const json& list = r.at("explicit");
        if (!list.is_array()) throw InputError("config.roster_spec.explicit: expected an array of models");
        for (std::size_t i = 0; i < list.size(); ++i)
          c.roster.models.push_back(model_from_json(list[i], "config.roster_spec.explicit[" + std::to_string(i) + "]"));
      } else {
        throw InputError("config.roster_spec: expected \"all_subsets\", {\"max_size\"} or {\"explicit\"}");
      }
    }
  }

  if (j.contains("variant")) {
    const json& v = j.at("variant");
    if (v.is_string()) {
      if (v.get<std::string>() != "standard") throw InputError("config.variant: unknown variant '" + v.get<std::string>() + "'");
    } else {
      reject_unknown(v, {"known_variance", "drifting_prior", "b0_sweep"}, "config.variant");
      if (v.size() != 1) throw InputError("config.variant: exactly one variant expected");
      if (v.contains("known_variance")) {
        const json& kv = v.at("known_variance");
        reject_unknown(kv, {"sigma_sq"}, "config.variant.known_variance");
        c.variant = KnownVarianceVariant{field_or<double>(kv, "sigma_sq", "config.variant.known_variance", 1.0)};
      } else if (v.contains("drifting_prior")) {
        const json& dp = v.at("drifting_prior");
        reject_unknown(dp, {"c", "exponent"}, "config.variant.drifting_prior");
        c.variant = DriftingPriorVariant{field_or<double>(dp, "c", "config.variant.drifting_prior", 1.0),
                                         field_or<double>(dp, "exponent", "config.variant.drifting_prior", 2.5)};
      } else {
        c.variant = B0SweepVariant{field<std::vector<double>>(v, "b0_sweep", "config.variant")};
      }
    }
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j{{"k", c.k},           {"relevant", c.relevant},       {"sigma0_sq", c.sigma0_sq},
         {"hyper", to_json(c.hyper)}, {"n_values", c.n_values}, {"reps", c.reps},
         {"base_seed", c.base_seed},  {"redraw_beta", c.redraw_beta}, {"threads", c.threads}};
  switch (c.roster.kind) {
    case RosterSpec::Kind::all_subsets: j["roster_spec"] = "all_subsets"; break;
    case RosterSpec::Kind::max_size: j["roster_spec"] = {{"max_size", c.roster.max_size}}; break;
    case RosterSpec::Kind::explicit_list: {
      json list = json::array();
      for (const auto& m : c.roster.models) list.push_back(to_json(m));
      j["roster_spec"] = {{"explicit", list}};
      break;
    }
  }
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, StandardVariant>) j["variant"] = "standard";
        else if constexpr (std::is_same_v<V, KnownVarianceVariant>) j["variant"] = {{"known_variance", {{"sigma_sq", v.sigma_sq}}}};
        else if constexpr (std::is_same_v<V, DriftingPriorVariant>) j["variant"] = {{"drifting_prior", {{"c", v.c}, {"exponent", v.exponent}}}};
        else j["variant"] = {{"b0_sweep", v.b0_values}};
      },
      c.variant);
  if (c.raw_records) j["raw_records"] = c.raw_records->string();
  return j;
}

json to_json(const WinningRateTable& t) {
  json blocks = json::array();
  for (const auto& b : t.blocks) {
    json sizes = json::object();
    for (const auto& [s, f] : b.size_frequency) sizes[std::to_string(s)] = f;
    json bj{{"n", b.n},
            {"reps", b.reps},
            {"failed", b.failed},
            {"disqualified_agents", b.disqualified_agents},
            {"excluded_ties", b.excluded_ties},
            {"size_frequency", sizes},
            {"model_frequency", b.model_frequency},
            {"freq_contains_true", b.freq_contains_true},
            {"freq_exact_true", b.freq_exact_true},
            {"freq_strictly_smaller", b.freq_strictly_smaller},
            {"tie_rate", b.tie_rate}};
    if (b.b0) bj["b0"] = *b.b0;
    blocks.push_back(std::move(bj));
  }
  return json{{"true_model", t.true_model}, {"redraw_beta", t.redraw_beta}, {"blocks", blocks}};
}

WinningRateTable table_from_json(const json& j) {
  WinningRateTable t;
  t.true_model = field<std::vector<int>>(j, "true_model", "table");
  t.redraw_beta = field<bool>(j, "redraw_beta", "table");
  for (const auto& bj : field<json>(j, "blocks", "table")) {
    RateBlock b;
    b.n = field<int>(bj, "n", "table.blocks");
    if (bj.contains("b0")) b.b0 = field<double>(bj, "b0", "table.blocks");
    b.reps = field<long>(bj, "reps", "table.blocks");
    b.failed = field<long>(bj, "failed", "table.blocks");
    b.disqualified_agents = field<long>(bj, "disqualified_agents", "table.blocks");
    b.excluded_ties = field<long>(bj, "excluded_ties", "table.blocks");
    const json sizes = field<json>(bj, "size_frequency", "table.blocks");
    for (const auto& [s, f] : sizes.items()) b.size_frequency[std::stoi(s)] = f.get<double>();
    b.model_frequency = field<std::map<std::string, double>>(bj, "model_frequency", "table.blocks");
    b.freq_contains_true = field<double>(bj, "freq_contains_true", "table.blocks");
    b.freq_exact_true = field<double>(bj, "freq_exact_true", "table.blocks");
    b.freq_strictly_smaller = field<double>(bj, "freq_strictly_smaller", "table.blocks");
    b.tie_rate = field<double>(bj, "tie_rate", "table.blocks");
    t.blocks.push_back(std::move(b));
  }
  return t;
}

json to_json(const std::vector<NSummary>& summary) {
  json out = json::array();
  for (const auto& s : summary) {
    json row{{"n", s.n},
             {"freq_contains_true", s.contains_true},
             {"freq_excludes_true", s.excludes_true},
             {"freq_exact_true", s.exact_true},
             {"freq_strictly_smaller", s.strictly_smaller},
             {"tie_rate", s.tie_rate},
             {"modal_winner", s.modal_winner},
             {"modal_frequency", s.modal_frequency},
             {"modal_size", s.modal_size}};
    if (s.b0) row["b0"] = *s.b0;
    out.push_back(std::move(row));
  }
  return out;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace modcomp::io
