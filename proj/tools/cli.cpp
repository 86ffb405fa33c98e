#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "modcomp/asymptotics.hpp"
#include "modcomp/competition.hpp"
#include "modcomp/error.hpp"
#include "modcomp/experiment.hpp"
#include "modcomp/io.hpp"
#include "modcomp/oracle.hpp"
#include "modcomp/posterior.hpp"

namespace modcomp::cli {

namespace {

using io::json;

void write_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot open " + path + " for writing");
  f << j.dump(2) << '\n';
  if (!f) throw InputError("write failed: " + path);
}

AgentRoster load_roster(const std::string& path, int k) { return io::roster_from_json(io::load_json(path), k); }

struct HyperFlags {
  double a0 = 2.0;
  double b0 = 1.0;
  double gamma = 0.001;

  void add_to(CLI::App* app) {
    app->add_option("--a0", a0, "Inverse-Gamma shape")->capture_default_str();
    app->add_option("--b0", b0, "Inverse-Gamma scale")->capture_default_str();
    app->add_option("--gamma", gamma, "prior precision scale")->capture_default_str();
  }
  Hyperparameters get() const { return {a0, b0, gamma}; }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian model competition: NIG posterior losses, winner selection and Monte Carlo sweeps", "modcomp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a winning-rate sweep from a JSON config");
  std::string sim_config, sim_out, sim_format = "csv", sim_raw;
  std::optional<std::uint64_t> sim_seed;
  std::optional<long> sim_reps;
  std::optional<unsigned> sim_threads;
  std::optional<bool> sim_redraw;
  simulate->add_option("--config", sim_config, "ExperimentConfig JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_out, "output path for the winning-rate table")->required();
  simulate->add_option("--format", sim_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  simulate->add_option("--seed", sim_seed, "overrides base_seed");
  simulate->add_option("--reps", sim_reps, "overrides reps");
  simulate->add_option("--threads", sim_threads, "worker threads (default: available parallelism)");
  simulate->add_option("--redraw-beta", sim_redraw, "overrides redraw_beta (true|false)");
  simulate->add_option("--raw", sim_raw, "also write one CSV row per replication here");

  // compete
  auto* compete = app.add_subcommand("compete", "run one competition on a dataset");
  std::string comp_data, comp_roster, comp_out;
  std::optional<double> comp_lump;
  compete->add_option("--data", comp_data, "dataset CSV (y,x1,...,xk)")->required()->check(CLI::ExistingFile);
  compete->add_option("--roster", comp_roster, "roster JSON")->required()->check(CLI::ExistingFile);
  compete->add_option("--out", comp_out, "output JSON path (default: stdout)");
  compete->add_option("--lump-sum", comp_lump, "also run the second-price auction with this M");

  // posterior
  auto* posterior = app.add_subcommand("posterior", "print one agent's posterior loss decomposition");
  std::string post_data, post_model;
  std::optional<double> post_known;
  HyperFlags post_hyper;
  posterior->add_option("--data", post_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  posterior->add_option("--model", post_model, "covariates, e.g. 1,3")->required();
  post_hyper.add_to(posterior);
  posterior->add_option("--known-sigma-sq", post_known, "point-mass variance prior");

  // exante
  auto* exante = app.add_subcommand("exante", "Bayes risk before data (gamma -> 0)");
  std::string ex_model;
  int ex_size = 0, ex_n = 0;
  HyperFlags ex_hyper;
  auto* ex_model_opt = exante->add_option("--model", ex_model, "covariates, e.g. 1,3");
  exante->add_option("--size", ex_size, "model size |J|")->excludes(ex_model_opt);
  exante->add_option("--n", ex_n, "sample size")->required();
  ex_hyper.add_to(exante);

  // asymptotics
  auto* asym = app.add_subcommand("asymptotics", "AIC, large-n approximation and KTK table for a roster");
  std::string as_data, as_roster, as_sign = "laplace";
  asym->add_option("--data", as_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  asym->add_option("--roster", as_roster, "roster JSON")->required()->check(CLI::ExistingFile);
  asym->add_option("--ktk-sign", as_sign, "laplace|flipped|mixed")->check(CLI::IsMember({"laplace", "flipped", "mixed"}))->capture_default_str();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force validators");
  oracle_cmd->require_subcommand(1);
  auto* quad = oracle_cmd->add_subcommand("quadrature", "E[sigma^2|D] by grid quadrature (|J| <= 2)");
  std::string q_data, q_model;
  int q_beta_points = 81, q_sigma2_points = 1601;
  HyperFlags q_hyper;
  quad->add_option("--data", q_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  quad->add_option("--model", q_model, "covariates, e.g. 1,2")->required();
  quad->add_option("--beta-points", q_beta_points)->capture_default_str();
  quad->add_option("--sigma2-points", q_sigma2_points)->capture_default_str();
  q_hyper.add_to(quad);
  auto* mc = oracle_cmd->add_subcommand("mc", "Monte Carlo Bayes risk of a model-size-|J| agent");
  int mc_size = 1, mc_n = 10;
  long mc_reps = 10000;
  std::uint64_t mc_seed = 1;
  unsigned mc_threads = 0;
  HyperFlags mc_hyper;
  mc_hyper.gamma = 1e-6;
  mc->add_option("--size", mc_size, "model size |J|")->capture_default_str();
  mc->add_option("--n", mc_n, "sample size")->capture_default_str();
  mc->add_option("--reps", mc_reps)->capture_default_str();
  mc->add_option("--seed", mc_seed)->capture_default_str();
  mc->add_option("--threads", mc_threads);
  mc_hyper.add_to(mc);

  // sample
  auto* sample = app.add_subcommand("sample", "draw a dataset from a DGP");
  std::string sa_dgp, sa_out, sa_dgp_out;
  int sa_k = 6, sa_n = 50;
  std::vector<int> sa_relevant{1, 2, 3, 4, 5};
  double sa_sigma0 = 1.0;
  std::uint64_t sa_seed = 1;
  sample->add_option("--dgp", sa_dgp, "DgpSpec JSON (otherwise beta0 is drawn)")->check(CLI::ExistingFile);
  sample->add_option("--k", sa_k)->capture_default_str();
  sample->add_option("--relevant", sa_relevant, "nonzero coefficients")->delimiter(',');
  sample->add_option("--sigma0-sq", sa_sigma0)->capture_default_str();
  sample->add_option("--n", sa_n)->capture_default_str();
  sample->add_option("--seed", sa_seed)->capture_default_str();
  sample->add_option("--out", sa_out, "dataset CSV path")->required();
  sample->add_option("--dgp-out", sa_dgp_out, "also write the DgpSpec JSON");

  if (args.empty()) {
    err << app.help();
    return kExitInput;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*simulate) {
      ExperimentConfig config = io::config_from_json(io::load_json(sim_config));
      if (sim_seed) config.base_seed = *sim_seed;
      if (sim_reps) config.reps = *sim_reps;
      if (sim_threads) config.threads = *sim_threads;
      if (sim_redraw) config.redraw_beta = *sim_redraw;
      if (!sim_raw.empty()) config.raw_records = sim_raw;
      config.validate();
      if (config.sigma0_sq == 0.0) err << "warning: sigma0_sq = 0 (noiseless data)\n";
      const auto format = parse_emit_format(sim_format);
      std::vector<ReplicationRecord> records;
      const auto table = run_sweep(config, config.raw_records ? &records : nullptr, [&](const RateBlock& b) {
        err << "n=" << b.n;
        if (b.b0) err << " b0=" << *b.b0;
        err << " contains_true=" << b.freq_contains_true << " failed=" << b.failed << "\n";
      });
      emit(table, format, sim_out);
      if (config.raw_records) write_records_csv(records, *config.raw_records);
      out << json{{"config", io::to_json(config)}, {"output", sim_out}, {"summary", io::to_json(summarize(table))}}.dump()
          << '\n';
    } else if (*compete) {
      const Dataset data = io::load_dataset(comp_data);
      const AgentRoster roster = load_roster(comp_roster, data.k());
      const auto result = run_competition(data, roster);
      json j = io::to_json(result, roster);
      if (comp_lump) j["auction"] = io::to_json(auction_from(result, *comp_lump));
      write_json(j, comp_out, out);
    } else if (*posterior) {
      const Dataset data = io::load_dataset(post_data);
      AgentPrior agent = AgentPrior::nig(parse_model(post_model), post_hyper.get());
      agent.known_sigma_sq = post_known;
      agent.validate();
      write_json(io::to_json(posterior_loss(data, agent), agent.model), "", out);
    } else if (*exante) {
      Model model = ex_model.empty() ? Model::full(ex_size > 0 ? ex_size : throw InputError("exante: give --model or --size"))
                                     : parse_model(ex_model);
      const AgentPrior agent = AgentPrior::nig(model, ex_hyper.get());
      write_json(json{{"model", io::to_json(model)}, {"n", ex_n}, {"value", exante_expected_loss(agent, ex_n)}}, "", out);
    } else if (*asym) {
      const Dataset data = io::load_dataset(as_data);
      const AgentRoster roster = load_roster(as_roster, data.k());
      const KtkSign sign = parse_ktk_sign(as_sign);
      json rows = json::array();
      for (std::size_t i = 0; i < roster.size(); ++i) {
        const AgentPrior& a = roster.agents[i];
        json row{{"model", io::to_json(a.model)}, {"label", roster.labels[i]}};
        auto attempt = [&](const char* key, auto&& fn) {
          try {
            row[key] = fn();
          } catch (const std::exception& e) {
            row[key] = nullptr;
            row["errors"][key] = e.what();
          }
        };
        attempt("aic", [&] { return aic(data, a.model); });
        attempt("large_n_approx", [&] { return posterior_loss_large_n_approx(data, a); });
        attempt("exact_log_loss", [&] { return std::log(posterior_loss(data, a).total); });
        attempt("ktk_value", [&] { return ktk_expansion_sigma2(ktk_input(data, a), sign); });
        rows.push_back(std::move(row));
      }
      write_json(json{{"ktk_sign", as_sign}, {"rows", rows}}, "", out);
    } else if (*oracle_cmd) {
      if (*quad) {
        const Dataset data = io::load_dataset(q_data);
        const Model model = parse_model(q_model);
        const auto grid = oracle::default_grid(data, model, q_hyper.get(), q_beta_points, q_sigma2_points);
        write_json(json{{"value", oracle::quadrature_posterior_sigma2(data, model, q_hyper.get(), grid)}}, "", out);
      } else {
        const AgentPrior agent = AgentPrior::nig(Model::full(mc_size), mc_hyper.get());
        const auto est = oracle::mc_marginal_loss(agent, mc_n, mc_reps, Seed{mc_seed}, mc_threads ? mc_threads : 1);
        write_json(json{{"value", est.mean}, {"std_error", est.std_error}, {"reps", est.reps}}, "", out);
      }
    } else if (*sample) {
      DgpSpec spec = sa_dgp.empty()
                         ? sample_dgp(sa_k, sa_relevant, Seed{sa_seed}.with_stream(streams::coefficients), sa_sigma0)
                         : io::dgp_from_json(io::load_json(sa_dgp));
      if (spec.noiseless()) err << "warning: sigma0_sq = 0 (noiseless data)\n";
      io::save_dataset(sample_dataset(spec, sa_n, Seed{sa_seed}.with_stream(streams::data)), sa_out);
      if (!sa_dgp_out.empty()) write_json(io::to_json(spec), sa_dgp_out, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace modcomp::cli
