#pragma once

#include <optional>
#include <string>

#include "itact/distributions.hpp"
#include "itact/simplex_opt.hpp"
#include "itact/specs.hpp"

namespace itact {

struct CapResult {
  double capacity = 0.0;
  Pmf arg_pA;
  CondPmf arg_pX;                  // P(x|a,se); for the message-only variant P(x|u,se)
  CondPmf arg_pU;                  // P(u|a,se), message-only variant
  double slack = 0.0;              // I(X;Y,Sd|A) - I(X;Se|A) at the optimum
  bool condition_active = false;
  std::optional<double> unconstrained_value;
  bool infeasible = false;
  bool relaxed = false;
  bool converged = false;
  bool multimodal = false;
  std::size_t starts_used = 0;
  std::size_t iterations = 0;
  std::string note;
};

/// Both coordinates of a point of the modified rate region: the rate bound and
/// the dummy rate (the condition slack).
struct RmodPoint {
  double r = 0.0;
  double r_tilde = 0.0;
};

struct BoundSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ImproveResult {
  CondPmf pX2;
  double rate1 = 0.0;
  double rate2 = 0.0;
  double slack2 = 0.0;
};

struct InputPair {
  Pmf pA;
  CondPmf pX;
};

struct MixtureReport {
  double objective_mix = 0.0, objective_avg = 0.0;
  double slack_mix = 0.0, slack_avg = 0.0;
  /// Shortfall of each inequality, 0 when it holds.
  double objective_violation = 0.0, slack_violation = 0.0;
  bool holds = false;
};

/// Activity threshold on the unconstrained slack.
inline constexpr double kActivityThreshold = 1e-4;

/// max I(A,X;Y,Sd) - I(X;Se|A) subject to I(X;Y,Sd|A) - I(X;Se|A) >= 0. The
/// unconstrained maximum is solved as well to classify the condition.
CapResult capacity_ri(const ChannelSpec& spec, const OptOptions& opts = {});

CapResult capacity_unconstrained(const ChannelSpec& spec, const OptOptions& opts = {});

/// max I(A,U;Y,Sd) - I(U;Se|A) with X = f(U,Se). u_size 0 means
/// |A||Se||X|+1 capped at 16.
CapResult capacity_message_only(const ChannelSpec& spec, std::size_t u_size = 0,
                                const OptOptions& opts = {});

/// max I(A,Se,X;Y,Sd) - H(Se|A) subject to I(Se,X;Y,Sd|A) - H(Se|A) >= 0.
/// An empty feasible set yields capacity 0 with `infeasible` set.
CapResult capacity_state_recovery(const ChannelSpec& spec, const OptOptions& opts = {});

/// max I(X;Y) - I(X;Se) over P(x|se); needs |A| = |Sd| = 1.
CapResult capacity_stegotext(const ChannelSpec& spec, const OptOptions& opts = {});

/// I(A,X;Y,Sd) - I(X;Se|A) on a joint over (A,Se,Sd,X,Y).
double channel_objective(const JointDist& joint);

/// I(X;Y,Sd|A) - I(X;Se|A).
double condition_slack(const JointDist& joint);

RmodPoint rmod_point(const JointDist& joint);

/// lhs = I(Se,X;Y,Sd|A) - H(Se|A), rhs = condition_slack.
BoundSides state_recovery_gap(const JointDist& joint);

/// Folds the action into the encoder state, S'e = (Se, A) with index se * |A| + a,
/// so the main channel no longer needs the action.
ChannelSpec fold_action_into_state(const ChannelSpec& spec);

/// Replaces P(x|a,se) by its average over P(se|a). Requires Se - A - Sd and
/// Y - (X,Sd) - Se.
ImproveResult degenerate_improve(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX1);

/// Mixes two input laws with weight alpha on the first and checks that
/// objective and slack of the mixture dominate the weighted averages.
MixtureReport rmod_mixture_check(const ChannelSpec& spec, const InputPair& p1, const InputPair& p2,
                                 double alpha);

}  // namespace itact
