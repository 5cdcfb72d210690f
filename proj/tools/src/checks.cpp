#include "itact/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "itact/channel_cap.hpp"
#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/parallel.hpp"
#include "itact/rng.hpp"
#include "itact/source_rdc.hpp"
#include "itact/specs.hpp"

namespace itact {

namespace {

// Each case returns its violation; positive beyond the tolerance fails.
using CaseFn = std::function<double(CounterRng&)>;

struct Suite {
  std::string description;
  std::size_t cases;
  double tolerance;
  CaseFn body;
};

std::size_t pick(CounterRng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

Pmf random_pmf(CounterRng& rng, std::size_t k) { return Pmf(rng.dirichlet(k), "random pmf"); }

// Dirichlet weights with about a fifth of the cells zeroed.
std::vector<double> sparse_weights(CounterRng& rng, std::size_t k) {
  auto w = rng.dirichlet(k);
  for (auto& v : w)
    if (rng.uniform() < 0.2) v = 0.0;
  double t = 0.0;
  for (double v : w) t += v;
  if (t <= 0.0) return rng.dirichlet(k);
  for (auto& v : w) v /= t;
  return w;
}

double info_identities(CounterRng& rng) {
  const VarList vars{Var::X, Var::A, Var::Se, Var::Sd};
  std::vector<std::size_t> sizes;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    sizes.push_back(pick(rng, 1, 3));
    cells *= sizes.back();
  }
  const JointDist j(vars, sizes, rng.uniform() < 0.5 ? rng.dirichlet(cells) : sparse_weights(rng, cells));
  double worst = 0.0;
  auto nonneg = [&](double v) { worst = std::max(worst, -v); };
  nonneg(mutual_information(j, {Var::X}, {Var::A}));
  nonneg(mutual_information(j, {Var::X}, {Var::A}, {Var::Se}));
  nonneg(mutual_information(j, {Var::X, Var::Sd}, {Var::A}, {Var::Se}));
  nonneg(entropy(j, {Var::X}, {Var::A, Var::Se}));
  const double lhs = mutual_information(j, {Var::X}, {Var::A, Var::Sd}, {Var::Se});
  const double rhs = mutual_information(j, {Var::X}, {Var::A}, {Var::Se}) +
                     mutual_information(j, {Var::X}, {Var::Sd}, {Var::A, Var::Se});
  worst = std::max(worst, std::abs(lhs - rhs));
  const double h = entropy(j, {Var::X, Var::A});
  worst = std::max(worst, std::abs(h - entropy(j, {Var::X}) - entropy(j, {Var::A}, {Var::X})));
  return worst;
}

ChannelSpec random_small_channel(CounterRng& rng, bool allow_action) {
  return random_channel_spec(rng, pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 2), pick(rng, 2, 3),
                             pick(rng, 2, 3), allow_action && rng.uniform() < 0.5);
}

InputPair random_inputs(CounterRng& rng, const ChannelSpec& s) {
  return {random_pmf(rng, s.na), CondPmf({Var::A, Var::Se}, {s.na, s.nse}, {Var::X}, {s.nx},
                                         random_rows(rng, s.na * s.nse, s.nx), "random input")};
}

double recovery_bound(CounterRng& rng) {
  const auto s = random_small_channel(rng, true);
  const auto in = random_inputs(rng, s);
  const auto sides = state_recovery_gap(assemble_channel_joint(s, in.pA, in.pX));
  return sides.lhs - sides.rhs;
}

double mixture(CounterRng& rng) {
  const auto s = random_small_channel(rng, true);
  const auto p1 = random_inputs(rng, s);
  const auto p2 = random_inputs(rng, s);
  const auto rep = rmod_mixture_check(s, p1, p2, rng.uniform());
  return std::max(rep.objective_violation, rep.slack_violation);
}

double cr_forms(CounterRng& rng, const OptOptions& o) {
  const auto s = random_source_spec(rng, 2, 2, 2, 2, 2);
  double dmax = 0.0, cmax = 0.0;
  for (double v : s.distortion) dmax = std::max(dmax, v);
  for (double v : s.cost) cmax = std::max(cmax, v);
  const double dmin = min_distortion(s), cmin = min_cost(s);
  const RdcQuery q{dmin + (0.1 + 0.5 * rng.uniform()) * (dmax - dmin), cmin + rng.uniform() * (cmax - cmin)};
  return std::abs(rd_ac_cr(s, q, o).rate - rd_ac_cr_alt(s, q, o).rate);
}

double convexity(CounterRng& rng, const OptOptions& o) {
  static const SourceSpec spec = binary_action_source(0.25);
  const RdcQuery q1{0.3 * rng.uniform(), rng.uniform()};
  const RdcQuery q2{0.3 * rng.uniform(), rng.uniform()};
  const double lam = rng.uniform();
  const RdcQuery qm{lam * q1.D + (1 - lam) * q2.D, lam * q1.C + (1 - lam) * q2.C};
  const double chord = lam * rd_ac_cr(spec, q1, o).rate + (1 - lam) * rd_ac_cr(spec, q2, o).rate;
  return rd_ac_cr(spec, qm, o).rate - chord;
}

double averaging(CounterRng& rng) {
  const auto s = random_state_separable_channel(rng, pick(rng, 1, 3), pick(rng, 2, 3), pick(rng, 1, 2),
                                                pick(rng, 2, 3), pick(rng, 2, 3));
  const auto in = random_inputs(rng, s);
  const auto r = degenerate_improve(s, in.pA, in.pX);
  return std::max(-r.slack2, r.rate1 - r.rate2);
}

double relaxation_order(CounterRng& rng, const OptOptions& o) {
  const auto s = random_channel_spec(rng, 2, 2, 2, 2, 2, false);
  const double ri = capacity_ri(s, o).capacity;
  const double un = capacity_unconstrained(s, o).capacity;
  const double st = capacity_state_recovery(s, o).capacity;
  const double msg = capacity_message_only(s, 0, o).capacity;
  return std::max({ri - un, st - ri, ri - msg});
}

double action_folding(CounterRng& rng, const OptOptions& o) {
  const auto s = random_channel_spec(rng, 2, 2, pick(rng, 1, 2), 2, 2, true);
  return std::abs(capacity_ri(s, o).capacity - capacity_ri(fold_action_into_state(s), o).capacity);
}

const std::map<std::string, Suite>& suites() {
  static const std::map<std::string, Suite> all = [] {
    const OptOptions o;
    std::map<std::string, Suite> m;
    m["info_identities"] = {"mutual information is nonnegative and obeys the chain rule", 1000, 1e-9,
                            info_identities};
    m["recovery_bound"] = {"state-recovery condition never exceeds the reconstruction condition", 1000, 1e-9,
                           recovery_bound};
    m["mixture"] = {"objective and slack of a mixture dominate the weighted averages", 200, 1e-9, mixture};
    m["cr_forms"] = {"both forms of the common-reconstruction rate agree", 100, 2e-4,
                     [o](CounterRng& r) { return cr_forms(r, o); }};
    m["convexity"] = {"rate-distortion-cost function is convex in (D, C)", 100, 2e-3,
                      [o](CounterRng& r) { return convexity(r, o); }};
    m["averaging"] = {"averaging the input over the state keeps the condition and the rate", 100, 1e-9,
                      averaging};
    m["relaxation_order"] = {"unconstrained >= ri >= state recovery and message-only >= ri", 50, 1e-4,
                             [o](CounterRng& r) { return relaxation_order(r, o); }};
    m["action_folding"] = {"capacity is unchanged when the action is folded into the state", 20, 2e-3,
                           [o](CounterRng& r) { return action_folding(r, o); }};
    return m;
  }();
  return all;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"info_identities", "recovery_bound", "mixture", "cr_forms",
                                              "convexity",       "averaging",      "relaxation_order",
                                              "action_folding"};
  return names;
}

CheckOutcome run_check(const std::string& name, const CheckOptions& opts) {
  const auto it = suites().find(name);
  if (it == suites().end()) throw InvalidInput("unknown check '" + name + "'");
  const Suite& suite = it->second;
  const std::size_t cases = opts.cases ? opts.cases : suite.cases;
  const auto suite_index = static_cast<std::uint64_t>(
      std::find(check_names().begin(), check_names().end(), name) - check_names().begin());

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> violations(cases, 0.0);
  parallel_for(cases, opts.threads, [&](std::size_t c) {
    CounterRng rng(derive_seed(opts.seed, suite_index), c);
    violations[c] = suite.body(rng);
  });

  CheckOutcome out;
  out.name = name;
  out.description = suite.description;
  out.cases = cases;
  out.tolerance = suite.tolerance;
  for (double v : violations) {
    if (!(v <= suite.tolerance)) ++out.failures;
    out.worst = std::max(out.worst, std::isnan(v) ? INFINITY : v);
  }
  out.pass = out.failures == 0;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace itact
