// Agent population: hidden per-round profiles, the response protocol the
// learner interacts with, and seeded stream generators. Learner-facing code
// sees only (responded features, label); an information barrier makes reads
// of hidden state detectable at runtime.
#ifndef STRATCLASS_ENVIRONMENT_HPP
#define STRATCLASS_ENVIRONMENT_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stratclass/costs.hpp"
#include "stratclass/errors.hpp"
#include "stratclass/losses.hpp"
#include "stratclass/rng.hpp"

namespace stratclass {

// RAII marker for sections executing on the learner's behalf. While at least
// one scope is alive on the thread, AgentProfile's hidden accessors throw.
class LearnerScope {
 public:
  LearnerScope();
  ~LearnerScope();
  LearnerScope(const LearnerScope&) = delete;
  LearnerScope& operator=(const LearnerScope&) = delete;
};

bool in_learner_scope();

// One round's agent: true features x, label y in {-1, +1}, and for negative
// (gaming) agents the manipulation cost they optimize against. x and the
// cost are hidden state: accessors throw BarrierViolation inside a
// LearnerScope.
class AgentProfile {
 public:
  AgentProfile(Eigen::VectorXd x, int y,
               std::optional<CostSpec> cost = std::nullopt);

  int label() const { return y_; }
  int dim() const { return static_cast<int>(x_.size()); }
  bool strategic() const { return y_ == -1; }

  const Eigen::VectorXd& true_features() const;  // hidden
  const CostSpec& cost() const;                  // hidden

 private:
  Eigen::VectorXd x_;
  int y_;
  std::optional<CostSpec> cost_;
};

// What the learner is allowed to see after deploying beta.
struct Observation {
  Eigen::VectorXd xhat;
  int y = 0;
};

/// The agent's move: truthful features for y == +1, the cost's best response
/// for y == -1 (UnboundedResponse propagates for r == 1 past the threshold).
Observation respond(const AgentProfile& agent, const Eigen::VectorXd& beta);

/// Full-information evaluation of the round loss at beta, via the truthful
/// link for y == +1 and the strategic closed form for y == -1.
double ground_truth_loss(const AgentProfile& agent, LossKind kind,
                         const Eigen::VectorXd& beta);

enum class ClipMode { clip, reject };

// Feature sampler for stochastic streams. uniform_ball ignores the cluster
// fields; two_cluster draws center(y) + sigma * gaussian and keeps the result
// inside the R1 ball by radial clipping or by redrawing.
struct XSamplerSpec {
  enum class Kind { uniform_ball, two_cluster };
  Kind kind = Kind::uniform_ball;
  Eigen::VectorXd center_pos;
  Eigen::VectorXd center_neg;
  double sigma = 0.0;
  ClipMode mode = ClipMode::clip;
};

// Fixed list of profiles, checked against the feature radius bound.
struct ScriptedStream {
  std::vector<AgentProfile> profiles;
  double R1 = kInf;
};

// Seeded generator: each round is strategic with probability theta, features
// come from the sampler, and strategic rounds share one cost family.
struct StochasticStream {
  std::int64_t n = 0;
  int d = 0;
  double theta = 0.0;
  double R1 = 1.0;
  XSamplerSpec sampler;
  std::optional<CostSpec> cost;  // required when theta > 0
  std::uint64_t seed = 0;
};

using AgentStream = std::variant<ScriptedStream, StochasticStream>;

/// Materializes the full profile list up front (the population is oblivious:
/// it cannot depend on the learner's trajectory). Deterministic given the
/// stream's seed. Throws ConfigError on dimension or radius violations.
std::vector<AgentProfile> realize_stream(const AgentStream& stream);

}  // namespace stratclass

#endif  // STRATCLASS_ENVIRONMENT_HPP
