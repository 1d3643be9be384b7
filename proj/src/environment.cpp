#include "stratclass/environment.hpp"

#include <cmath>
#include <sstream>

namespace stratclass {

namespace {
thread_local int g_learner_scope_depth = 0;
}

LearnerScope::LearnerScope() { ++g_learner_scope_depth; }
LearnerScope::~LearnerScope() { --g_learner_scope_depth; }
bool in_learner_scope() { return g_learner_scope_depth > 0; }

AgentProfile::AgentProfile(Eigen::VectorXd x, int y,
                           std::optional<CostSpec> cost)
    : x_(std::move(x)), y_(y), cost_(std::move(cost)) {
  if (y_ != 1 && y_ != -1)
    throw std::invalid_argument("agent label must be +1 or -1");
  if (x_.size() == 0)
    throw std::invalid_argument("agent features must be nonempty");
  if (y_ == -1) {
    if (!cost_)
      throw std::invalid_argument("negative-label agents require a cost spec");
    if (cost_->dim != static_cast<int>(x_.size()))
      throw std::invalid_argument("agent cost spec dimension mismatch");
  } else if (cost_) {
    throw std::invalid_argument(
        "positive-label agents are truthful and carry no cost spec");
  }
}

const Eigen::VectorXd& AgentProfile::true_features() const {
  if (in_learner_scope())
    throw BarrierViolation(
        "learner-side code attempted to read true agent features");
  return x_;
}

const CostSpec& AgentProfile::cost() const {
  if (in_learner_scope())
    throw BarrierViolation(
        "learner-side code attempted to read the agent's cost spec");
  if (!cost_) throw std::logic_error("agent has no cost spec");
  return *cost_;
}

Observation respond(const AgentProfile& agent, const Eigen::VectorXd& beta) {
  if (agent.label() == 1) return {agent.true_features(), 1};
  const BestResponse br =
      best_response(agent.cost(), agent.true_features(), beta);
  return {br.xhat, -1};
}

double ground_truth_loss(const AgentProfile& agent, LossKind kind,
                         const Eigen::VectorXd& beta) {
  if (agent.label() == 1)
    return observed_loss(kind, agent.true_features(), 1, beta);
  return strategic_loss_closed_form(agent.cost(), kind, agent.true_features(),
                                    beta);
}

namespace {

Eigen::VectorXd draw_features(Rng& rng, const StochasticStream& cfg, int y) {
  const auto& xs = cfg.sampler;
  switch (xs.kind) {
    case XSamplerSpec::Kind::uniform_ball: {
      const double u = rng.uniform01();
      const Eigen::VectorXd dir = unit_sphere_vector(rng, cfg.d);
      return cfg.R1 * std::pow(u, 1.0 / cfg.d) * dir;
    }
    case XSamplerSpec::Kind::two_cluster: {
      const Eigen::VectorXd& center = y == 1 ? xs.center_pos : xs.center_neg;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        Eigen::VectorXd x = center + xs.sigma * gaussian_vector(rng, cfg.d);
        const double nrm = x.norm();
        if (nrm <= cfg.R1) return x;
        if (xs.mode == ClipMode::clip) return (cfg.R1 / nrm) * x;
      }
      throw ConfigError(
          "two_cluster sampler: rejection failed to land inside the feature "
          "ball after 10000 attempts");
    }
  }
  throw ConfigError("unknown feature sampler kind");
}

std::vector<AgentProfile> realize_scripted(const ScriptedStream& s) {
  std::vector<AgentProfile> out = s.profiles;
  if (!out.empty()) {
    const int d = out.front().dim();
    for (const AgentProfile& a : out) {
      if (a.dim() != d)
        throw ConfigError("scripted stream mixes feature dimensions");
      const double nrm = a.true_features().norm();
      if (nrm > s.R1 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "scripted features with norm " << nrm
            << " exceed the feature radius bound " << s.R1;
        throw ConfigError(msg.str());
      }
    }
  }
  return out;
}

std::vector<AgentProfile> realize_stochastic(const StochasticStream& s) {
  if (s.n < 0) throw ConfigError("stream length must be nonnegative");
  if (s.d < 1) throw ConfigError("stream dimension must be >= 1");
  if (!(s.theta >= 0.0 && s.theta <= 1.0))
    throw ConfigError("strategic fraction theta must lie in [0, 1]");
  if (!(s.R1 > 0.0)) throw ConfigError("feature radius R1 must be positive");
  if (s.theta > 0.0 && !s.cost)
    throw ConfigError("stochastic stream with theta > 0 needs a cost family");
  if (s.cost && s.cost->dim != s.d)
    throw ConfigError("stream cost family dimension mismatch");
  if (s.sampler.kind == XSamplerSpec::Kind::two_cluster) {
    if (s.sampler.center_pos.size() != s.d ||
        s.sampler.center_neg.size() != s.d)
      throw ConfigError("two_cluster centers must match the stream dimension");
    if (!(s.sampler.sigma >= 0.0) || !std::isfinite(s.sampler.sigma))
      throw ConfigError("two_cluster sigma must be finite and nonnegative");
  }

  Rng rng(s.seed);
  std::vector<AgentProfile> out;
  out.reserve(static_cast<std::size_t>(s.n));
  for (std::int64_t t = 0; t < s.n; ++t) {
    // Fixed per-round draw order: label first, then features.
    const int y = rng.uniform01() <= s.theta ? -1 : 1;
    Eigen::VectorXd x = draw_features(rng, s, y);
    if (y == -1)
      out.emplace_back(std::move(x), y, *s.cost);
    else
      out.emplace_back(std::move(x), y);
  }
  return out;
}

}  // namespace

std::vector<AgentProfile> realize_stream(const AgentStream& stream) {
  if (const auto* s = std::get_if<ScriptedStream>(&stream))
    return realize_scripted(*s);
  return realize_stochastic(std::get<StochasticStream>(stream));
}

}  // namespace stratclass
