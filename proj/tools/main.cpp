// Command-line front end: run / sweep / validate / oracle.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stratclass/harness.hpp"

namespace {

using namespace stratclass;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string num_or_null(double v) {
  if (std::isnan(v)) return "null";
  return fmt17(v);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const std::string& tok : split_commas(s)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ConfigError(what + ": cannot parse '" + tok + "'");
    }
  }
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s,
                                         const std::string& what) {
  std::vector<std::int64_t> out;
  for (double v : parse_double_list(s, what)) {
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError(what + ": expected integers");
    out.push_back(i);
  }
  return out;
}

double parse_exponent_arg(const std::string& s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "inf" || lower == "infinity") return kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("exponent: cannot parse '" + s + "'");
  }
}

Eigen::VectorXd vec_from(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  for (int i = 0; i < out.size(); ++i) out(i) = v[static_cast<std::size_t>(i)];
  return out;
}

Eigen::MatrixXd mat_from_row_major(const std::vector<double>& v, int d) {
  if (static_cast<int>(v.size()) != d * d)
    throw ConfigError("transform: expected " + std::to_string(d * d) +
                      " row-major entries");
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out(i, j) = v[static_cast<std::size_t>(i * d + j)];
  return out;
}

std::string json_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(v(i));
  }
  out += "]";
  return out;
}

struct CostArgs {
  std::string p = "2";
  double r = 2.0;
  double eps = 1.0;
  std::string a;  // row-major entries; empty = identity
};

void add_cost_options(CLI::App* cmd, CostArgs& args) {
  cmd->add_option("--p", args.p, "feature-space norm exponent (number or inf)");
  cmd->add_option("--r", args.r, "cost growth degree");
  cmd->add_option("--eps", args.eps, "smallest singular value floor");
  cmd->add_option("--a", args.a,
                  "row-major transform entries, comma separated (default "
                  "identity)");
}

CostSpec build_cost(const CostArgs& args, int d) {
  Eigen::MatrixXd A;
  if (args.a.empty())
    A = Eigen::MatrixXd::Identity(d, d);
  else
    A = mat_from_row_major(parse_double_list(args.a, "--a"), d);
  return make_cost_spec(parse_exponent_arg(args.p), args.r, A, args.eps);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_override, bool no_round_log) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) {
    cfg.seed = *seed;
    cfg.echo["seed"] = *seed;  // the echo determines the artifacts
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (no_round_log) cfg.round_log = false;

  const RunOutcome outcome = run_experiment(cfg);
  emit(outcome.records, outcome.report ? &*outcome.report : nullptr, outcome.d,
       cfg.out_dir, &cfg.echo);

  if (!outcome.abort_error.empty()) {
    std::cerr << "run aborted after " << outcome.records.size()
              << " recorded rounds: " << outcome.abort_error << "\n"
              << "partial artifacts written to " << cfg.out_dir << "\n";
    return 2;
  }
  const RegretReport& r = *outcome.report;
  std::cout << "n=" << r.n << " d=" << r.d
            << " theta_realized=" << fmt17(r.theta_realized)
            << " theta_hat=" << fmt17(r.theta_hat) << "\n"
            << "cum_loss=" << fmt17(r.cum_loss)
            << " baseline_loss=" << fmt17(r.baseline_loss) << " (gap "
            << fmt17(r.baseline_gap) << ")\n"
            << "regret=" << fmt17(r.regret)
            << " gamma_fit=" << num_or_null(r.gamma_fit) << "\n"
            << "artifacts written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& n_grid,
              const std::string& theta_grid, int replicates,
              const std::string& out_override) {
  ExperimentConfig cfg = load_config(config_path);
  if (replicates > 0) cfg.replicates = replicates;
  if (!out_override.empty()) cfg.out_dir = out_override;

  const SweepTable table =
      sweep(cfg, parse_int_list(n_grid, "--n-grid"),
            parse_double_list(theta_grid, "--theta-grid"));
  emit_sweep(table, cfg.out_dir, &cfg.echo);

  int failed = 0;
  for (const SweepRow& row : table.rows) {
    if (!row.error.empty()) {
      ++failed;
      std::cerr << "cell theta=" << fmt17(row.theta) << " n=" << row.n
                << " failed: " << row.error << "\n";
      continue;
    }
    std::cout << "theta=" << fmt17(row.theta) << " n=" << row.n
              << " mean_regret=" << fmt17(row.mean_regret) << " (stderr "
              << fmt17(row.stderr_regret) << ", " << row.replicates
              << " replicates)\n";
  }
  for (const SweepThetaFit& fit : table.gamma_by_theta)
    std::cout << "theta=" << num_or_null(fit.theta)
              << " gamma_fit=" << num_or_null(fit.gamma_fit) << "\n";
  std::cout << "artifacts written to " << cfg.out_dir << "\n";
  return failed == static_cast<int>(table.rows.size()) && failed > 0 ? 1 : 0;
}

int cmd_validate(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);

  double theta_hat;
  double theta_realized = std::numeric_limits<double>::quiet_NaN();
  if (cfg.stream.scripted_path) {
    const auto profiles =
        load_scripted_csv(*cfg.stream.scripted_path, cfg.d, cfg.cost.eps);
    if (static_cast<std::int64_t>(profiles.size()) != cfg.n)
      throw ConfigError("scripted stream provides " +
                        std::to_string(profiles.size()) +
                        " rounds but the horizon is " + std::to_string(cfg.n));
    std::int64_t strategic = 0;
    for (const auto& a : profiles) strategic += a.label() == -1;
    theta_realized = profiles.empty()
                         ? 0.0
                         : static_cast<double>(strategic) /
                               static_cast<double>(profiles.size());
    theta_hat =
        cfg.theta_hat_fixed >= 0.0 ? cfg.theta_hat_fixed : theta_realized;
  } else {
    theta_hat = cfg.theta_hat_fixed >= 0.0
                    ? cfg.theta_hat_fixed
                    : std::min(1.0, cfg.stream.stochastic->theta *
                                        cfg.theta_hat_slack);
  }

  const LossConstants consts = constants(cfg.cost, cfg.loss, cfg.R1, cfg.R2);
  const Schedule sched =
      make_schedule(cfg.n, cfg.d, cfg.R2, consts.M, consts.L, theta_hat);

  std::cout << "{\n"
            << "  \"valid\": true,\n"
            << "  \"n\": " << cfg.n << ",\n"
            << "  \"d\": " << cfg.d << ",\n"
            << "  \"theta_hat\": " << fmt17(theta_hat) << ",\n";
  if (!std::isnan(theta_realized))
    std::cout << "  \"theta_realized\": " << fmt17(theta_realized) << ",\n";
  std::cout << "  \"delta\": " << fmt17(sched.delta) << ",\n"
            << "  \"eta\": " << fmt17(sched.eta) << ",\n"
            << "  \"M\": " << fmt17(consts.M) << ",\n"
            << "  \"L\": " << fmt17(consts.L) << ",\n"
            << "  \"C\": " << fmt17(consts.C) << "\n"
            << "}\n";
  return 0;
}

int cmd_oracle_best_response(const CostArgs& cost_args,
                             const std::string& x_str,
                             const std::string& beta_str) {
  const Eigen::VectorXd x = vec_from(parse_double_list(x_str, "--x"));
  const Eigen::VectorXd beta = vec_from(parse_double_list(beta_str, "--beta"));
  if (x.size() != beta.size())
    throw ConfigError("--x and --beta must have the same dimension");
  const CostSpec spec = build_cost(cost_args, static_cast<int>(x.size()));
  const BestResponse br = best_response(spec, x, beta);
  std::cout << "{\"xhat\": " << json_vector(br.xhat)
            << ", \"inner\": " << fmt17(br.inner) << "}\n";
  return 0;
}

int cmd_oracle_conjugate(const CostArgs& cost_args,
                         const std::string& beta_str) {
  const Eigen::VectorXd beta = vec_from(parse_double_list(beta_str, "--beta"));
  const CostSpec spec = build_cost(cost_args, static_cast<int>(beta.size()));
  std::cout << "{\"value\": " << fmt17(conjugate_value(spec, beta))
            << ", \"subgradient\": "
            << json_vector(conjugate_subgradient(spec, beta)) << "}\n";
  return 0;
}

int cmd_oracle_hindsight(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  std::vector<AgentProfile> agents;
  if (cfg.stream.scripted_path) {
    auto profiles =
        load_scripted_csv(*cfg.stream.scripted_path, cfg.d, cfg.cost.eps);
    agents = realize_stream(ScriptedStream{std::move(profiles), cfg.R1});
  } else {
    StochasticStream s;
    s.n = cfg.n;
    s.d = cfg.d;
    s.theta = cfg.stream.stochastic->theta;
    s.R1 = cfg.R1;
    s.sampler = cfg.stream.stochastic->sampler;
    s.cost = cfg.cost;
    s.seed = derive_seed(cfg.seed, SeedRole::stream, 0, 0);
    agents = realize_stream(std::move(s));
  }
  const HindsightSolution sol = hindsight_optimum(
      agents, cfg.loss, cfg.R2, cfg.baseline.iterations, cfg.baseline.tol);
  std::cout << "{\"beta_star\": " << json_vector(sol.beta_star)
            << ", \"total_loss\": " << fmt17(sol.total_loss)
            << ", \"certified_gap\": " << fmt17(sol.certified_gap)
            << ", \"iterations\": " << sol.iterations
            << ", \"n_agents\": " << sol.n_agents << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Online linear classification against cost-driven feature gaming"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute one seeded experiment");
  std::string run_config;
  std::uint64_t run_seed = 0;
  std::string run_out;
  bool run_no_round_log = false;
  run->add_option("--config", run_config, "JSON config path")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "override the seed");
  run->add_option("--out", run_out, "override the output directory");
  run->add_flag("--no-round-log", run_no_round_log,
                "suppress per-round CSV rows");

  // sweep
  auto* sw = app.add_subcommand("sweep", "grid of runs over n and theta");
  std::string sw_config, sw_n_grid, sw_theta_grid, sw_out;
  int sw_replicates = 0;
  sw->add_option("--config", sw_config, "JSON config path")->required();
  sw->add_option("--n-grid", sw_n_grid, "comma-separated horizons");
  sw->add_option("--theta-grid", sw_theta_grid,
                 "comma-separated strategic fractions");
  sw->add_option("--replicates", sw_replicates, "replicates per cell");
  sw->add_option("--out", sw_out, "override the output directory");

  // validate
  auto* val = app.add_subcommand(
      "validate", "check a config and print the derived schedule");
  std::string val_config;
  val->add_option("--config", val_config, "JSON config path")->required();

  // oracle
  auto* oracle =
      app.add_subcommand("oracle", "reference oracles for test tooling");
  oracle->require_subcommand(1);

  auto* obr = oracle->add_subcommand("best-response",
                                     "closed-form agent best response");
  CostArgs obr_cost;
  std::string obr_x, obr_beta;
  add_cost_options(obr, obr_cost);
  obr->add_option("--x", obr_x, "true features, comma separated")->required();
  obr->add_option("--beta", obr_beta, "classifier, comma separated")
      ->required();

  auto* ocj = oracle->add_subcommand("conjugate",
                                     "dual-norm-power value and subgradient");
  CostArgs ocj_cost;
  std::string ocj_beta;
  add_cost_options(ocj, ocj_cost);
  ocj->add_option("--beta", ocj_beta, "classifier, comma separated")
      ->required();

  auto* ohs = oracle->add_subcommand(
      "hindsight", "best fixed classifier on a config's stream");
  std::string ohs_config;
  ohs->add_option("--config", ohs_config, "JSON config path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return cmd_run(run_config,
                     seed_opt->count() ? std::optional<std::uint64_t>(run_seed)
                                       : std::nullopt,
                     run_out, run_no_round_log);
    if (*sw)
      return cmd_sweep(sw_config, sw_n_grid, sw_theta_grid, sw_replicates,
                       sw_out);
    if (*val) return cmd_validate(val_config);
    if (*obr) return cmd_oracle_best_response(obr_cost, obr_x, obr_beta);
    if (*ocj) return cmd_oracle_conjugate(ocj_cost, ocj_beta);
    if (*ohs) return cmd_oracle_hindsight(ohs_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
