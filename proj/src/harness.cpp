#include "stratclass/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

namespace stratclass {

namespace fs = std::filesystem;
using nlohmann::json;

// ----------------------------------------------------------------- helpers --

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_token(const std::string& tok, const std::string& ctx) {
  const std::string t = trim(tok);
  std::string lower;
  for (char c : t) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) fail(ctx + ": trailing characters in number '" + t + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(ctx + ": cannot parse number '" + t + "'");
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON number for the hand-written writers; NaN maps to null.
std::string json_num(double v) {
  if (std::isnan(v)) return "null";
  return fmt17(v);
}

double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> v;
  for (const auto& [x, y] : pts)
    if (x > 0.0 && y > 0.0) v.emplace_back(std::log(x), std::log(y));
  if (v.size() < 2) return kNaN;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : v) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(v.size());
  my /= static_cast<double>(v.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : v) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) return kNaN;
  return sxy / sxx;
}

std::vector<std::int64_t> checkpoint_rounds(std::int64_t n) {
  std::vector<std::int64_t> cps;
  for (std::int64_t t = 1; t < n; t *= 2) cps.push_back(t);
  if (n >= 1) cps.push_back(n);
  return cps;
}

// ------------------------------------------------------------ JSON parsing --

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        ok = true;
        break;
      }
    if (!ok) fail(ctx + ": unknown key '" + it.key() + "'");
  }
}

const json& require_key(const json& obj, const char* key,
                        const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ctx + ": missing required key '" + std::string(key) + "'");
  return *it;
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + ": expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) fail(ctx + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx + ": expected a string");
  return v.get<std::string>();
}

double as_exponent(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    std::string lower;
    for (char c : v.get<std::string>())
      lower.push_back(static_cast<char>(std::tolower(c)));
    if (lower == "inf" || lower == "infinity") return kInf;
    fail(ctx + ": expected a number or \"inf\"");
  }
  return as_number(v, ctx);
}

Eigen::VectorXd as_vector(const json& v, int d, const std::string& ctx) {
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    fail(ctx + ": expected an array of " + std::to_string(d) + " numbers");
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) out(i) = as_number(v[i], ctx);
  return out;
}

Eigen::MatrixXd as_matrix_row_major(const json& v, int d,
                                    const std::string& ctx) {
  if (!v.is_array() || static_cast<int>(v.size()) != d * d)
    fail(ctx + ": expected a row-major array of " + std::to_string(d * d) +
         " numbers");
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = as_number(v[i * d + j], ctx);
  return out;
}

XSamplerSpec parse_sampler(const json& v, int d) {
  const std::string ctx = "stream.stochastic.x_sampler";
  if (!v.is_object()) fail(ctx + ": expected an object");
  const std::string kind = as_string(require_key(v, "kind", ctx), ctx + ".kind");
  XSamplerSpec xs;
  if (kind == "uniform_ball") {
    check_keys(v, {"kind"}, ctx);
    xs.kind = XSamplerSpec::Kind::uniform_ball;
  } else if (kind == "two_cluster") {
    check_keys(v, {"kind", "center_pos", "center_neg", "sigma", "mode"}, ctx);
    xs.kind = XSamplerSpec::Kind::two_cluster;
    xs.center_pos =
        as_vector(require_key(v, "center_pos", ctx), d, ctx + ".center_pos");
    xs.center_neg =
        as_vector(require_key(v, "center_neg", ctx), d, ctx + ".center_neg");
    xs.sigma = as_number(require_key(v, "sigma", ctx), ctx + ".sigma");
    if (!(xs.sigma >= 0.0) || !std::isfinite(xs.sigma))
      fail(ctx + ".sigma: must be finite and nonnegative");
    if (v.contains("mode")) {
      const std::string mode = as_string(v["mode"], ctx + ".mode");
      if (mode == "clip")
        xs.mode = ClipMode::clip;
      else if (mode == "reject")
        xs.mode = ClipMode::reject;
      else
        fail(ctx + ".mode: expected \"clip\" or \"reject\"");
    }
  } else {
    fail(ctx + ".kind: expected \"uniform_ball\" or \"two_cluster\"");
  }
  return xs;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config: expected a JSON object");
  check_keys(doc,
             {"schema", "n", "d", "R1", "R2", "loss", "stream", "cost",
              "theta_hat", "theta_hat_slack", "seed", "replicates", "baseline",
              "out_dir", "round_log"},
             "config");
  if (as_integer(require_key(doc, "schema", "config"), "config.schema") != 1)
    fail("config.schema: only schema 1 is supported");

  ExperimentConfig cfg;
  cfg.echo = doc;
  cfg.n = as_integer(require_key(doc, "n", "config"), "config.n");
  if (cfg.n < 1) fail("config.n: horizon must be >= 1");
  const std::int64_t d64 = as_integer(require_key(doc, "d", "config"), "config.d");
  if (d64 < 1 || d64 > 4096) fail("config.d: dimension out of range");
  cfg.d = static_cast<int>(d64);
  cfg.R1 = as_number(require_key(doc, "R1", "config"), "config.R1");
  if (!(cfg.R1 > 0.0) || !std::isfinite(cfg.R1))
    fail("config.R1: feature radius must be positive");
  cfg.R2 = as_number(require_key(doc, "R2", "config"), "config.R2");
  if (!(cfg.R2 >= 1.0) || !std::isfinite(cfg.R2))
    fail("config.R2: weight radius must be >= 1");

  const std::string loss =
      as_string(require_key(doc, "loss", "config"), "config.loss");
  if (loss == "logistic")
    cfg.loss = LossKind::logistic;
  else if (loss == "hinge")
    cfg.loss = LossKind::hinge;
  else
    fail("config.loss: expected \"logistic\" or \"hinge\"");

  // cost family
  {
    const json& c = require_key(doc, "cost", "config");
    if (!c.is_object()) fail("config.cost: expected an object");
    check_keys(c, {"p", "r", "eps", "A"}, "config.cost");
    const double p = as_exponent(require_key(c, "p", "config.cost"), "config.cost.p");
    const double r = as_number(require_key(c, "r", "config.cost"), "config.cost.r");
    if (r == 1.0)
      fail("config.cost.r: the experiment family needs r > 1 (r == 1 rounds "
           "may appear in scripted rows)");
    const double eps =
        as_number(require_key(c, "eps", "config.cost"), "config.cost.eps");
    const Eigen::MatrixXd A =
        as_matrix_row_major(require_key(c, "A", "config.cost"), cfg.d,
                            "config.cost.A");
    try {
      cfg.cost = make_cost_spec(p, r, A, eps);
    } catch (const std::exception& e) {
      fail(std::string("config.cost: ") + e.what());
    }
  }

  // stream
  {
    const json& s = require_key(doc, "stream", "config");
    if (!s.is_object()) fail("config.stream: expected an object");
    check_keys(s, {"scripted", "stochastic"}, "config.stream");
    if (s.contains("scripted") == s.contains("stochastic"))
      fail("config.stream: exactly one of \"scripted\" / \"stochastic\"");
    if (s.contains("scripted")) {
      cfg.stream.scripted_path =
          as_string(s["scripted"], "config.stream.scripted");
    } else {
      const json& st = s["stochastic"];
      if (!st.is_object()) fail("config.stream.stochastic: expected an object");
      check_keys(st, {"theta", "x_sampler"}, "config.stream.stochastic");
      StochasticStreamConfig sc;
      sc.theta = as_number(require_key(st, "theta", "config.stream.stochastic"),
                           "config.stream.stochastic.theta");
      if (!(sc.theta >= 0.0 && sc.theta <= 1.0))
        fail("config.stream.stochastic.theta: must lie in [0, 1]");
      sc.sampler = parse_sampler(
          require_key(st, "x_sampler", "config.stream.stochastic"), cfg.d);
      cfg.stream.stochastic = std::move(sc);
    }
  }

  if (doc.contains("theta_hat")) {
    const json& th = doc["theta_hat"];
    if (th.is_string()) {
      if (th.get<std::string>() != "auto")
        fail("config.theta_hat: expected \"auto\" or a number in [0, 1]");
      cfg.theta_hat_fixed = -1.0;
    } else {
      cfg.theta_hat_fixed = as_number(th, "config.theta_hat");
      if (!(cfg.theta_hat_fixed >= 0.0 && cfg.theta_hat_fixed <= 1.0))
        fail("config.theta_hat: must lie in [0, 1]");
    }
  }
  if (doc.contains("theta_hat_slack")) {
    cfg.theta_hat_slack =
        as_number(doc["theta_hat_slack"], "config.theta_hat_slack");
    if (!(cfg.theta_hat_slack >= 1.0))
      fail("config.theta_hat_slack: must be >= 1");
  }
  if (cfg.theta_hat_fixed >= 0.0 && cfg.stream.stochastic &&
      cfg.theta_hat_fixed < cfg.stream.stochastic->theta)
    fail("config.theta_hat: fixed value below the stream's strategic "
         "fraction");

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (s.is_number_unsigned())
      cfg.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
      cfg.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
    else
      fail("config.seed: expected a nonnegative integer");
  }
  if (doc.contains("replicates")) {
    const std::int64_t rep = as_integer(doc["replicates"], "config.replicates");
    if (rep < 1 || rep > 100000) fail("config.replicates: out of range");
    cfg.replicates = static_cast<int>(rep);
  }
  if (doc.contains("baseline")) {
    const json& b = doc["baseline"];
    if (!b.is_object()) fail("config.baseline: expected an object");
    check_keys(b, {"iterations", "tol"}, "config.baseline");
    if (b.contains("iterations")) {
      cfg.baseline.iterations =
          as_integer(b["iterations"], "config.baseline.iterations");
      if (cfg.baseline.iterations < 1)
        fail("config.baseline.iterations: must be >= 1");
    }
    if (b.contains("tol")) {
      cfg.baseline.tol = as_number(b["tol"], "config.baseline.tol");
      if (!(cfg.baseline.tol > 0.0)) fail("config.baseline.tol: must be > 0");
    }
  }
  if (doc.contains("out_dir"))
    cfg.out_dir = as_string(doc["out_dir"], "config.out_dir");
  if (doc.contains("round_log")) {
    if (!doc["round_log"].is_boolean())
      fail("config.round_log: expected a boolean");
    cfg.round_log = doc["round_log"].get<bool>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail("config parse error in " + path + ": " + e.what());
  }
  ExperimentConfig cfg = parse_config(doc);
  if (cfg.stream.scripted_path) {
    fs::path sp(*cfg.stream.scripted_path);
    if (sp.is_relative()) {
      const fs::path base = fs::path(path).parent_path();
      cfg.stream.scripted_path = (base / sp).string();
    }
  }
  return cfg;
}

// ------------------------------------------------------------ scripted CSV --

std::vector<AgentProfile> load_scripted_csv(const std::string& path, int d,
                                            double eps_floor) {
  std::ifstream in(path);
  if (!in) fail("cannot open scripted stream: " + path);
  std::vector<AgentProfile> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string ctx = path + ":" + std::to_string(lineno);
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;

    std::vector<std::string> toks;
    std::stringstream ss(stripped);
    std::string tok;
    while (std::getline(ss, tok, ',')) toks.push_back(trim(tok));
    while (!toks.empty() && toks.back().empty()) toks.pop_back();

    const std::size_t truthful_width = 1 + static_cast<std::size_t>(d);
    const std::size_t gaming_width =
        truthful_width + 3 + static_cast<std::size_t>(d) * d;

    if (toks.size() < truthful_width) fail(ctx + ": too few columns");
    const double yv = parse_double_token(toks[0], ctx);
    if (yv != 1.0 && yv != -1.0) fail(ctx + ": label must be +1 or -1");
    const int y = static_cast<int>(yv);

    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = parse_double_token(toks[1 + i], ctx);

    if (y == 1) {
      if (toks.size() != truthful_width)
        fail(ctx + ": truthful rows take exactly y and " + std::to_string(d) +
             " features");
      out.emplace_back(std::move(x), 1);
      continue;
    }

    if (toks.size() != gaming_width)
      fail(ctx + ": gaming rows take y, features, p, r, eps and a row-major " +
           std::to_string(d) + "x" + std::to_string(d) + " transform");
    const double p = parse_double_token(toks[truthful_width], ctx);
    const double r = parse_double_token(toks[truthful_width + 1], ctx);
    const double eps = parse_double_token(toks[truthful_width + 2], ctx);
    if (eps < eps_floor * (1.0 - 1e-12))
      fail(ctx + ": row eps " + fmt17(eps) +
           " below the experiment floor " + fmt17(eps_floor));
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        A(i, j) = parse_double_token(toks[truthful_width + 3 + i * d + j], ctx);
    try {
      out.emplace_back(std::move(x), -1, make_cost_spec(p, r, A, eps));
    } catch (const std::exception& e) {
      fail(ctx + ": " + e.what());
    }
  }
  return out;
}

// -------------------------------------------------------------- round loop --

namespace {

struct Trajectory {
  std::vector<RoundRecord> records;
  double cum_loss = 0.0;
  std::vector<std::pair<std::int64_t, double>> cum_at;  // checkpoint partials
  bool aborted = false;
  std::string abort_error;
  std::int64_t rounds = 0;
};

Trajectory run_rounds(const std::vector<AgentProfile>& agents,
                      const Schedule& schedule, LossKind kind,
                      std::uint64_t optimizer_seed, bool keep_records) {
  Trajectory traj;
  const auto cps = checkpoint_rounds(static_cast<std::int64_t>(agents.size()));
  std::size_t cp_i = 0;
  OptimizerState st = make_optimizer_state(schedule, optimizer_seed);
  if (keep_records) traj.records.reserve(agents.size());

  for (std::int64_t t = 0; t < static_cast<std::int64_t>(agents.size()); ++t) {
    const Eigen::VectorXd beta_t = st.beta;
    const Eigen::VectorXd beta_plus = propose(st, schedule);

    Observation obs;
    try {
      obs = respond(agents[static_cast<std::size_t>(t)], beta_plus);
    } catch (const UnboundedResponse& e) {
      traj.aborted = true;
      traj.abort_error = e.what();
      break;
    }

    double suffered = 0.0;
    bool strategic_fb = false;
    {
      // Everything in this scope acts on the learner's behalf and sees only
      // the observation; profile reads would throw BarrierViolation.
      LearnerScope scope;
      suffered = observed_loss(kind, obs.xhat, obs.y, beta_plus);
      Feedback fb;
      if (obs.y == 1) {
        fb = NonStrategicFeedback{
            nonstrategic_subgradient(kind, obs.xhat, beta_t)};
      } else {
        fb = StrategicFeedback{suffered};
        strategic_fb = true;
      }
      update(st, schedule, fb);
    }

    traj.cum_loss += suffered;
    traj.rounds = t + 1;
    if (keep_records)
      traj.records.push_back({t + 1, beta_plus, obs.y, obs.xhat, suffered,
                              strategic_fb, traj.cum_loss});
    if (cp_i < cps.size() && cps[cp_i] == t + 1) {
      traj.cum_at.emplace_back(t + 1, traj.cum_loss);
      ++cp_i;
    }
  }
  return traj;
}

// One (theta, n) cell: shared stream and baselines, replicates differing only
// in the optimizer's draw stream.
struct CellData {
  double theta_realized = 0.0;
  double theta_hat = 0.0;
  LossConstants consts;
  Schedule schedule;
  HindsightSolution full;
  Trajectory traj0;
  std::vector<double> rep_regrets;
  RegretReport report0;
  bool aborted = false;
  std::string abort_error;
};

std::vector<AgentProfile> realize_for(const ExperimentConfig& cfg,
                                      std::optional<double> theta,
                                      std::int64_t n, std::uint64_t cell) {
  if (cfg.stream.scripted_path) {
    auto profiles = load_scripted_csv(*cfg.stream.scripted_path, cfg.d,
                                      cfg.cost.eps);
    if (static_cast<std::int64_t>(profiles.size()) != n)
      fail("scripted stream provides " + std::to_string(profiles.size()) +
           " rounds but the horizon is " + std::to_string(n));
    return realize_stream(ScriptedStream{std::move(profiles), cfg.R1});
  }
  StochasticStream s;
  s.n = n;
  s.d = cfg.d;
  s.theta = theta.value();
  s.R1 = cfg.R1;
  s.sampler = cfg.stream.stochastic->sampler;
  s.cost = cfg.cost;
  s.seed = derive_seed(cfg.seed, SeedRole::stream, cell, 0);
  return realize_stream(std::move(s));
}

double resolve_theta_hat(const ExperimentConfig& cfg,
                         std::optional<double> theta_configured,
                         double realized) {
  if (cfg.theta_hat_fixed >= 0.0) return cfg.theta_hat_fixed;
  if (!theta_configured) return realized;  // scripted: exact fraction
  return std::min(1.0, *theta_configured * cfg.theta_hat_slack);
}

CellData run_cell(const ExperimentConfig& cfg, std::optional<double> theta,
                  std::int64_t n, std::uint64_t cell, int replicates,
                  bool keep_records) {
  CellData out;
  const std::vector<AgentProfile> agents = realize_for(cfg, theta, n, cell);

  std::int64_t strategic_rounds = 0;
  for (const AgentProfile& a : agents) strategic_rounds += a.label() == -1;
  out.theta_realized =
      agents.empty() ? 0.0
                     : static_cast<double>(strategic_rounds) /
                           static_cast<double>(agents.size());
  out.theta_hat = resolve_theta_hat(cfg, theta, out.theta_realized);
  out.consts = constants(cfg.cost, cfg.loss, cfg.R1, cfg.R2);
  out.schedule =
      make_schedule(n, cfg.d, cfg.R2, out.consts.M, out.consts.L,
                    out.theta_hat);

  for (int rep = 0; rep < replicates; ++rep) {
    Trajectory traj = run_rounds(
        agents, out.schedule, cfg.loss,
        derive_seed(cfg.seed, SeedRole::optimizer, cell,
                    static_cast<std::uint64_t>(rep)),
        keep_records && rep == 0);
    if (traj.aborted) {
      out.aborted = true;
      out.abort_error = traj.abort_error;
      if (rep == 0) out.traj0 = std::move(traj);
      return out;
    }
    out.rep_regrets.push_back(traj.cum_loss);  // baseline subtracted below
    if (rep == 0) out.traj0 = std::move(traj);
  }

  try {
    out.full = hindsight_optimum(agents, cfg.loss, cfg.R2,
                                 cfg.baseline.iterations, cfg.baseline.tol);
    for (double& r : out.rep_regrets) r -= out.full.total_loss;

    // Report for replicate 0, with honest prefix baselines per checkpoint.
    RegretReport rep0;
    rep0.n = n;
    rep0.d = cfg.d;
    rep0.theta_realized = out.theta_realized;
    rep0.theta_hat = out.theta_hat;
    rep0.delta = out.schedule.delta;
    rep0.eta = out.schedule.eta;
    rep0.M = out.consts.M;
    rep0.L = out.consts.L;
    rep0.C = out.consts.C;
    rep0.cum_loss = out.traj0.cum_loss;
    rep0.baseline_loss = out.full.total_loss;
    rep0.baseline_gap = out.full.certified_gap;
    rep0.regret = out.traj0.cum_loss - out.full.total_loss;
    rep0.seed = cfg.seed;

    std::vector<std::pair<double, double>> fit_pts;
    for (const auto& [t, cum] : out.traj0.cum_at) {
      CheckpointEntry e;
      e.t = t;
      e.cum_loss = cum;
      if (t == n) {
        e.baseline_loss = out.full.total_loss;
        e.baseline_gap = out.full.certified_gap;
      } else {
        const std::vector<AgentProfile> prefix(
            agents.begin(), agents.begin() + static_cast<std::ptrdiff_t>(t));
        const HindsightSolution sol = hindsight_optimum(
            prefix, cfg.loss, cfg.R2, cfg.baseline.iterations,
            cfg.baseline.tol);
        e.baseline_loss = sol.total_loss;
        e.baseline_gap = sol.certified_gap;
      }
      e.regret = e.cum_loss - e.baseline_loss;
      fit_pts.emplace_back(static_cast<double>(t), e.regret);
      rep0.checkpoints.push_back(e);
    }
    rep0.gamma_fit = loglog_slope(fit_pts);
    out.report0 = std::move(rep0);
  } catch (const DegenerateDegree& e) {
    // A degree-1 gaming profile that stayed bounded during the run still has
    // no exact-subgradient hindsight optimum, so a completed trajectory can
    // lack a well-defined regret; keep the records and skip the report.
    out.aborted = true;
    out.abort_error =
        std::string("hindsight baseline undefined for this stream: ") +
        e.what();
  }
  return out;
}

}  // namespace

// ----------------------------------------------------------------- running --

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  std::optional<double> theta;
  if (cfg.stream.stochastic) theta = cfg.stream.stochastic->theta;

  CellData cell = run_cell(cfg, theta, cfg.n, /*cell=*/0, /*replicates=*/1,
                           cfg.round_log);
  RunOutcome out;
  out.d = cfg.d;
  out.records = std::move(cell.traj0.records);
  if (cell.aborted) {
    out.abort_error = cell.abort_error;
    return out;
  }
  out.report = std::move(cell.report0);
  return out;
}

double stackelberg_regret(const std::vector<RoundRecord>& records,
                          const HindsightSolution& baseline) {
  if (static_cast<std::int64_t>(records.size()) != baseline.n_agents) {
    std::ostringstream msg;
    msg << "records cover " << records.size() << " rounds, baseline covers "
        << baseline.n_agents;
    throw LengthMismatch(msg.str());
  }
  double cum = 0.0;
  for (const RoundRecord& r : records) cum += r.suffered_loss;
  return cum - baseline.total_loss;
}

// ------------------------------------------------------------------- sweep --

SweepTable sweep(const ExperimentConfig& cfg,
                 std::vector<std::int64_t> n_values,
                 std::vector<double> theta_values) {
  const bool scripted = cfg.stream.scripted_path.has_value();
  if (scripted && !theta_values.empty())
    fail("sweep over theta requires a stochastic stream");
  if (n_values.empty()) n_values = {cfg.n};
  if (scripted) {
    for (std::int64_t n : n_values)
      if (n != cfg.n)
        fail("scripted streams have a fixed horizon; n grid must match it");
  }
  for (std::int64_t n : n_values)
    if (n < 1) fail("sweep n grid: horizons must be >= 1");
  if (theta_values.empty()) {
    theta_values = {cfg.stream.stochastic ? cfg.stream.stochastic->theta
                                          : kNaN};
  }
  for (double th : theta_values)
    if (!scripted && !(th >= 0.0 && th <= 1.0))
      fail("sweep theta grid: values must lie in [0, 1]");

  const std::size_t n_count = n_values.size();
  const std::size_t cells = theta_values.size() * n_count;
  std::vector<std::future<SweepRow>> futures;
  futures.reserve(cells);

  for (std::size_t ti = 0; ti < theta_values.size(); ++ti) {
    for (std::size_t ni = 0; ni < n_count; ++ni) {
      const std::uint64_t cell = ti * n_count + ni;  // theta-major
      const double th = theta_values[ti];
      const std::int64_t n = n_values[ni];
      futures.push_back(std::async(std::launch::async, [&cfg, scripted, th, n,
                                                        cell]() {
        SweepRow row;
        row.theta = th;
        row.n = n;
        row.replicates = cfg.replicates;
        try {
          std::optional<double> theta;
          if (!scripted) theta = th;
          CellData cd = run_cell(cfg, theta, n, cell, cfg.replicates,
                                 /*keep_records=*/false);
          if (cd.aborted) {
            row.error = cd.abort_error;
            return row;
          }
          if (scripted) row.theta = cd.theta_realized;
          row.report = std::move(cd.report0);
          row.replicate_regrets = std::move(cd.rep_regrets);
          const double k = static_cast<double>(row.replicate_regrets.size());
          double mean = 0.0;
          for (double r : row.replicate_regrets) mean += r;
          mean /= k;
          row.mean_regret = mean;
          if (row.replicate_regrets.size() > 1) {
            double ss = 0.0;
            for (double r : row.replicate_regrets)
              ss += (r - mean) * (r - mean);
            row.stderr_regret = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
          }
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        return row;
      }));
    }
  }

  SweepTable table;
  table.rows.reserve(cells);
  for (auto& f : futures) table.rows.push_back(f.get());

  for (std::size_t ti = 0; ti < theta_values.size(); ++ti) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t ni = 0; ni < n_count; ++ni) {
      const SweepRow& row = table.rows[ti * n_count + ni];
      if (row.error.empty())
        pts.emplace_back(static_cast<double>(row.n), row.mean_regret);
    }
    table.gamma_by_theta.push_back({theta_values[ti], loglog_slope(pts)});
  }
  return table;
}

// -------------------------------------------------------------------- emit --

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot open output file: " + path);
  out << content;
  if (!out) fail("failed writing output file: " + path);
}

std::string report_json_text(const RegretReport& r) {
  std::ostringstream o;
  o << "{\n";
  o << "  \"n\": " << r.n << ",\n";
  o << "  \"d\": " << r.d << ",\n";
  o << "  \"theta_realized\": " << json_num(r.theta_realized) << ",\n";
  o << "  \"theta_hat\": " << json_num(r.theta_hat) << ",\n";
  o << "  \"delta\": " << json_num(r.delta) << ",\n";
  o << "  \"eta\": " << json_num(r.eta) << ",\n";
  o << "  \"M\": " << json_num(r.M) << ",\n";
  o << "  \"L\": " << json_num(r.L) << ",\n";
  o << "  \"C\": " << json_num(r.C) << ",\n";
  o << "  \"cum_loss\": " << json_num(r.cum_loss) << ",\n";
  o << "  \"baseline_loss\": " << json_num(r.baseline_loss) << ",\n";
  o << "  \"baseline_gap\": " << json_num(r.baseline_gap) << ",\n";
  o << "  \"regret\": " << json_num(r.regret) << ",\n";
  o << "  \"checkpoints\": [";
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    const CheckpointEntry& e = r.checkpoints[i];
    o << (i == 0 ? "\n" : ",\n");
    o << "    {\"t\": " << e.t << ", \"cum_loss\": " << json_num(e.cum_loss)
      << ", \"baseline_loss\": " << json_num(e.baseline_loss)
      << ", \"baseline_gap\": " << json_num(e.baseline_gap)
      << ", \"regret\": " << json_num(e.regret) << "}";
  }
  o << (r.checkpoints.empty() ? "],\n" : "\n  ],\n");
  o << "  \"gamma_fit\": " << json_num(r.gamma_fit) << ",\n";
  o << "  \"seed\": " << r.seed << "\n";
  o << "}\n";
  return o.str();
}

std::string rounds_csv_text(const std::vector<RoundRecord>& records, int d) {
  std::ostringstream o;
  o << "t,y,loss,cum_loss,feedback_kind";
  for (int i = 1; i <= d; ++i) o << ",beta_plus_" << i;
  for (int i = 1; i <= d; ++i) o << ",xhat_" << i;
  o << "\n";
  for (const RoundRecord& r : records) {
    o << r.t << "," << r.y << "," << fmt17(r.suffered_loss) << ","
      << fmt17(r.cumulative_loss) << ","
      << (r.strategic_feedback ? "strategic" : "nonstrategic");
    for (int i = 0; i < d; ++i) o << "," << fmt17(r.beta_plus(i));
    for (int i = 0; i < d; ++i) o << "," << fmt17(r.xhat(i));
    o << "\n";
  }
  return o.str();
}

}  // namespace

void emit(const std::vector<RoundRecord>& records, const RegretReport* report,
          int d, const std::string& directory, const json* config_echo) {
  fs::create_directories(directory);
  const fs::path dir(directory);
  write_file((dir / "rounds.csv").string(), rounds_csv_text(records, d));
  if (report)
    write_file((dir / "report.json").string(), report_json_text(*report));
  if (config_echo)
    write_file((dir / "config-echo.json").string(), config_echo->dump(2) + "\n");
}

void emit_sweep(const SweepTable& table, const std::string& directory,
                const json* config_echo) {
  fs::create_directories(directory);
  const fs::path dir(directory);

  std::ostringstream csv;
  csv << "theta,n,replicates,mean_regret,stderr_regret,regret_rep0,"
         "theta_realized,baseline_loss,baseline_gap,delta,eta,gamma_fit_run,"
         "error\n";
  for (const SweepRow& row : table.rows) {
    csv << fmt17(row.theta) << "," << row.n << "," << row.replicates << ",";
    if (row.error.empty() && row.report) {
      const RegretReport& r = *row.report;
      csv << fmt17(row.mean_regret) << "," << fmt17(row.stderr_regret) << ","
          << fmt17(r.regret) << "," << fmt17(r.theta_realized) << ","
          << fmt17(r.baseline_loss) << "," << fmt17(r.baseline_gap) << ","
          << fmt17(r.delta) << "," << fmt17(r.eta) << ","
          << fmt17(r.gamma_fit) << ",";
    } else {
      csv << ",,,,,,,,,";
    }
    std::string err = row.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    csv << err << "\n";
  }
  write_file((dir / "sweep.csv").string(), csv.str());

  std::ostringstream o;
  o << "{\n  \"rows\": [";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& row = table.rows[i];
    o << (i == 0 ? "\n" : ",\n");
    o << "    {\"theta\": " << json_num(row.theta) << ", \"n\": " << row.n
      << ", \"replicates\": " << row.replicates;
    if (row.error.empty() && row.report) {
      o << ", \"mean_regret\": " << json_num(row.mean_regret)
        << ", \"stderr_regret\": " << json_num(row.stderr_regret)
        << ", \"theta_realized\": " << json_num(row.report->theta_realized)
        << ", \"theta_hat\": " << json_num(row.report->theta_hat)
        << ", \"delta\": " << json_num(row.report->delta)
        << ", \"eta\": " << json_num(row.report->eta)
        << ", \"baseline_loss\": " << json_num(row.report->baseline_loss)
        << ", \"baseline_gap\": " << json_num(row.report->baseline_gap)
        << ", \"regret_rep0\": " << json_num(row.report->regret)
        << ", \"gamma_fit_run\": " << json_num(row.report->gamma_fit)
        << ", \"replicate_regrets\": [";
      for (std::size_t k = 0; k < row.replicate_regrets.size(); ++k)
        o << (k ? ", " : "") << json_num(row.replicate_regrets[k]);
      o << "]";
    } else {
      json err = row.error;  // JSON-escape the message
      o << ", \"error\": " << err.dump();
    }
    o << "}";
  }
  o << (table.rows.empty() ? "],\n" : "\n  ],\n");
  o << "  \"gamma_fit_by_theta\": [";
  for (std::size_t i = 0; i < table.gamma_by_theta.size(); ++i) {
    o << (i == 0 ? "\n" : ",\n");
    o << "    {\"theta\": " << json_num(table.gamma_by_theta[i].theta)
      << ", \"gamma_fit\": " << json_num(table.gamma_by_theta[i].gamma_fit)
      << "}";
  }
  o << (table.gamma_by_theta.empty() ? "]\n" : "\n  ]\n");
  o << "}\n";
  write_file((dir / "sweep.json").string(), o.str());

  if (config_echo)
    write_file((dir / "config-echo.json").string(), config_echo->dump(2) + "\n");
}

}  // namespace stratclass
