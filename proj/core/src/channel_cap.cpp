#include "itact/channel_cap.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/product_model.hpp"

namespace itact {

namespace {

constexpr std::size_t kMaxMaps = 4096;
constexpr double kMarkovTol = 1e-9;

std::shared_ptr<ProductModel> channel_model(const ChannelSpec& s, std::size_t nu = 0) {
  VarList vars{Var::A, Var::Se, Var::Sd, Var::X, Var::Y};
  std::vector<std::size_t> sizes{s.na, s.nse, s.nsd, s.nx, s.ny};
  if (nu > 0) {
    vars.push_back(Var::U);
    sizes.push_back(nu);
  }
  auto m = std::make_shared<ProductModel>(vars, sizes);
  m->multiply_fixed({Var::A, Var::Se, Var::Sd}, s.state_channel.table());
  if (s.action_dependent) {
    m->multiply_fixed({Var::X, Var::Se, Var::Sd, Var::A, Var::Y}, s.main_channel.table());
  } else {
    m->multiply_fixed({Var::X, Var::Se, Var::Sd, Var::Y}, s.main_channel.table());
  }
  m->add_block({}, Var::A);
  return m;
}

InfoExpr objective_expr(const ProductModel& m) {
  InfoExpr e(m);
  e.mutual_info(1, {Var::A, Var::X}, {Var::Y, Var::Sd}).mutual_info(-1, {Var::X}, {Var::Se}, {Var::A});
  return e;
}

InfoExpr slack_expr(const ProductModel& m) {
  InfoExpr e(m);
  e.mutual_info(1, {Var::X}, {Var::Y, Var::Sd}, {Var::A}).mutual_info(-1, {Var::X}, {Var::Se}, {Var::A});
  return e;
}

void fill_inputs(const ChannelSpec& s, const ProductModel& m, std::span<const double> x, CapResult& out) {
  const auto pa = m.block(x, 0);
  out.arg_pA = Pmf(std::vector<double>(pa.begin(), pa.end()), "optimizer argument");
  const auto px = m.block(x, 1);
  out.arg_pX = CondPmf({Var::A, Var::Se}, {s.na, s.nse}, {Var::X}, {s.nx},
                       std::vector<double>(px.begin(), px.end()), "optimizer argument");
}

void fill_meta(const OptResult& r, CapResult& out) {
  out.converged = r.converged;
  out.multimodal = r.multimodal;
  out.starts_used = r.starts_used;
  out.iterations = r.iterations;
}

double eval_on(const ProductModel& m, const InfoExpr& e, std::span<const double> x) {
  std::vector<double> cells(m.cells());
  m.joint(x, cells);
  return e(cells, {});
}

CapResult solve_unconstrained(const ChannelSpec& spec, const OptOptions& opts) {
  const auto m = channel_model(spec);
  m->add_block({Var::A, Var::Se}, Var::X);
  const auto slack = slack_expr(*m);
  OptProblem p;
  p.shape = m->shape();
  p.sense = Sense::Maximize;
  p.objective = lift(m, objective_expr(*m));
  const auto r = optimize(p, opts);

  CapResult out;
  out.capacity = std::max(0.0, r.value);
  out.unconstrained_value = out.capacity;
  fill_inputs(spec, *m, r.argument, out);
  out.slack = eval_on(*m, slack, r.argument);
  out.condition_active = out.slack < -kActivityThreshold;
  if (!out.condition_active && out.slack < 0.0) {
    out.note = "slack within activity threshold; condition classified inactive";
  }
  fill_meta(r, out);
  return out;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > (std::size_t{1} << 40) / b) return std::size_t{1} << 40;
    r *= b;
  }
  return r;
}

std::size_t choose(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c > 1e12 ? static_cast<std::size_t>(1e12) : static_cast<std::size_t>(std::llround(c));
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace

double channel_objective(const JointDist& joint) {
  return mutual_information(joint, {Var::A, Var::X}, {Var::Y, Var::Sd}) -
         mutual_information(joint, {Var::X}, {Var::Se}, {Var::A});
}

double condition_slack(const JointDist& joint) {
  return mutual_information(joint, {Var::X}, {Var::Y, Var::Sd}, {Var::A}) -
         mutual_information(joint, {Var::X}, {Var::Se}, {Var::A});
}

RmodPoint rmod_point(const JointDist& joint) {
  return {std::max(0.0, channel_objective(joint)), condition_slack(joint)};
}

BoundSides state_recovery_gap(const JointDist& joint) {
  BoundSides s;
  s.lhs = mutual_information(joint, {Var::Se, Var::X}, {Var::Y, Var::Sd}, {Var::A}) -
          entropy(joint, {Var::Se}, {Var::A});
  s.rhs = condition_slack(joint);
  return s;
}

CapResult capacity_unconstrained(const ChannelSpec& spec, const OptOptions& opts) {
  spec.validate();
  return solve_unconstrained(spec, opts);
}

CapResult capacity_ri(const ChannelSpec& spec, const OptOptions& opts) {
  spec.validate();
  const auto m = channel_model(spec);
  m->add_block({Var::A, Var::Se}, Var::X);
  OptProblem p;
  p.shape = m->shape();
  p.sense = Sense::Maximize;
  p.objective = lift(m, objective_expr(*m));
  p.constraints = {lift(m, slack_expr(*m))};
  // X independent of Se given A always has nonnegative slack
  p.anchor = m->uniform_point();
  const auto r = optimize(p, opts);

  CapResult out;
  out.capacity = std::max(0.0, r.value);
  fill_inputs(spec, *m, r.argument, out);
  out.slack = r.constraint_slacks[0];
  fill_meta(r, out);

  OptOptions uo = opts;
  uo.initial_points.insert(uo.initial_points.begin(), r.argument);
  const auto un = solve_unconstrained(spec, uo);
  out.unconstrained_value = std::max(un.capacity, out.capacity);
  out.condition_active = un.condition_active;
  out.note = un.note;
  return out;
}

CapResult capacity_state_recovery(const ChannelSpec& spec, const OptOptions& opts) {
  spec.validate();
  const auto m = channel_model(spec);
  m->add_block({Var::A, Var::Se}, Var::X);
  InfoExpr objective(*m), condition(*m);
  objective.mutual_info(1, {Var::A, Var::Se, Var::X}, {Var::Y, Var::Sd}).entropy(-1, {Var::Se}, {Var::A});
  condition.mutual_info(1, {Var::Se, Var::X}, {Var::Y, Var::Sd}, {Var::A}).entropy(-1, {Var::Se}, {Var::A});

  OptProblem probe;
  probe.shape = m->shape();
  probe.sense = Sense::Maximize;
  probe.objective = lift(m, condition);
  const auto best_condition = optimize(probe, opts);

  CapResult out;
  if (best_condition.value < -opts.feasibility_tol) {
    out.infeasible = true;
    out.capacity = 0.0;
    fill_inputs(spec, *m, best_condition.argument, out);
    out.slack = eval_on(*m, slack_expr(*m), best_condition.argument);
    out.note = "lossless-state condition cannot be met";
    fill_meta(best_condition, out);
    return out;
  }

  OptProblem p;
  p.shape = m->shape();
  p.sense = Sense::Maximize;
  p.objective = lift(m, objective);
  p.constraints = {lift(m, condition)};
  p.anchor = best_condition.argument;
  OptOptions o = opts;
  o.initial_points.insert(o.initial_points.begin(), best_condition.argument);
  const auto r = optimize(p, o);
  out.capacity = std::max(0.0, r.value);
  fill_inputs(spec, *m, r.argument, out);
  out.slack = eval_on(*m, slack_expr(*m), r.argument);
  fill_meta(r, out);
  return out;
}

CapResult capacity_stegotext(const ChannelSpec& spec, const OptOptions& opts) {
  spec.validate();
  if (spec.na != 1 || spec.nsd != 1) {
    throw InvalidInput("capacity_stegotext: needs |A| = 1 and a constant decoder state");
  }
  auto out = solve_unconstrained(spec, opts);
  out.unconstrained_value.reset();
  out.condition_active = false;
  out.note.clear();
  return out;
}

CapResult capacity_message_only(const ChannelSpec& spec, std::size_t u_size, const OptOptions& opts) {
  spec.validate();
  if (u_size == 0) u_size = std::min(spec.na * spec.nse * spec.nx + 1, kMaxAuxSize);
  if (u_size > kMaxAuxSize) {
    throw InvalidInput("capacity_message_only: auxiliary alphabet size exceeds " +
                       std::to_string(kMaxAuxSize));
  }

  // A map f(u, se) is a column per u; u labels are exchangeable and repeated
  // columns can be merged, so only sets of distinct columns matter.
  const std::size_t columns = ipow(spec.nx, spec.nse);
  const std::size_t k = std::min(u_size, columns);
  const bool relaxed = choose(columns, k) > kMaxMaps;

  const auto m = channel_model(spec, u_size);
  m->add_block({Var::A, Var::Se}, Var::U);
  if (relaxed) m->add_block({Var::U, Var::Se}, Var::X);
  InfoExpr objective(*m);
  objective.mutual_info(1, {Var::A, Var::U}, {Var::Y, Var::Sd}).mutual_info(-1, {Var::U}, {Var::Se}, {Var::A});

  // u < nx mapped to the constant column x = u embeds any P(x|a,se) with U = X;
  // the unconstrained optimum is embedded that way
  std::vector<double> embed;
  if (u_size >= spec.nx) {
    const auto base = solve_unconstrained(spec, opts);
    embed = m->uniform_point();
    for (std::size_t a = 0; a < spec.na; ++a) embed[m->block_offset(0) + a] = base.arg_pA[a];
    const std::size_t off = m->block_offset(1);
    for (std::size_t r = 0; r < spec.na * spec.nse; ++r) {
      const auto row = base.arg_pX.row(r);
      for (std::size_t u = 0; u < u_size; ++u) embed[off + r * u_size + u] = u < spec.nx ? row[u] : 0.0;
    }
  }

  CapResult out;
  out.relaxed = relaxed;
  if (relaxed) {
    if (!embed.empty()) {
      const std::size_t off = m->block_offset(2);
      for (std::size_t u = 0; u < u_size; ++u) {
        for (std::size_t se = 0; se < spec.nse; ++se) {
          for (std::size_t x = 0; x < spec.nx; ++x) {
            embed[off + (u * spec.nse + se) * spec.nx + x] =
                u < spec.nx ? (x == u ? 1.0 : 0.0) : 1.0 / static_cast<double>(spec.nx);
          }
        }
      }
    }
    OptProblem p;
    p.shape = m->shape();
    p.sense = Sense::Maximize;
    p.objective = lift(m, objective);
    OptOptions o = opts;
    if (!embed.empty()) o.initial_points.insert(o.initial_points.begin(), embed);
    const auto r = optimize(p, o);
    out.capacity = std::max(0.0, r.value);
    const auto pa = m->block(r.argument, 0);
    out.arg_pA = Pmf(std::vector<double>(pa.begin(), pa.end()), "optimizer argument");
    const auto pu = m->block(r.argument, 1);
    out.arg_pU = CondPmf({Var::A, Var::Se}, {spec.na, spec.nse}, {Var::U}, {u_size},
                         std::vector<double>(pu.begin(), pu.end()), "optimizer argument");
    const auto px = m->block(r.argument, 2);
    out.arg_pX = CondPmf({Var::U, Var::Se}, {u_size, spec.nse}, {Var::X}, {spec.nx},
                         std::vector<double>(px.begin(), px.end()), "optimizer argument");
    out.note = "deterministic map relaxed to a stochastic P(x|u,se)";
    fill_meta(r, out);
    return out;
  }

  // column c assigns x = digit se of c in base nx; constant columns come first
  std::vector<std::size_t> order;
  for (std::size_t x = 0; x < spec.nx; ++x) {
    std::size_t c = 0;
    for (std::size_t se = 0; se < spec.nse; ++se) c = c * spec.nx + x;
    order.push_back(c);
  }
  for (std::size_t c = 0; c < columns; ++c) {
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
  }
  auto column_x = [&](std::size_t c, std::size_t se) {
    for (std::size_t i = spec.nse - 1; i > se; --i) c /= spec.nx;
    return c % spec.nx;
  };

  const auto maps = subsets(columns, k);
  OptOptions o = opts;
  o.starts = std::max<std::size_t>(1, opts.starts / maps.size());
  bool have = false;
  for (std::size_t mi = 0; mi < maps.size(); ++mi) {
    auto mm = std::make_shared<ProductModel>(*m);
    std::vector<double> f(u_size * spec.nse * spec.nx, 0.0);
    for (std::size_t u = 0; u < u_size; ++u) {
      const std::size_t c = order[maps[mi][u < k ? u : 0]];
      for (std::size_t se = 0; se < spec.nse; ++se) f[(u * spec.nse + se) * spec.nx + column_x(c, se)] = 1.0;
    }
    mm->multiply_fixed({Var::U, Var::Se, Var::X}, f);
    InfoExpr obj(*mm);
    obj.mutual_info(1, {Var::A, Var::U}, {Var::Y, Var::Sd}).mutual_info(-1, {Var::U}, {Var::Se}, {Var::A});
    OptProblem p;
    p.shape = mm->shape();
    p.sense = Sense::Maximize;
    p.objective = lift(mm, obj);
    OptOptions mo = o;
    mo.seed = derive_seed(opts.seed, mi);
    if (mi == 0 && !embed.empty()) mo.initial_points.insert(mo.initial_points.begin(), embed);
    const auto r = optimize(p, mo);
    if (!have || r.value > out.capacity) {
      have = true;
      out.capacity = r.value;
      const auto pa = mm->block(r.argument, 0);
      out.arg_pA = Pmf(std::vector<double>(pa.begin(), pa.end()), "optimizer argument");
      const auto pu = mm->block(r.argument, 1);
      out.arg_pU = CondPmf({Var::A, Var::Se}, {spec.na, spec.nse}, {Var::U}, {u_size},
                           std::vector<double>(pu.begin(), pu.end()), "optimizer argument");
      out.arg_pX = CondPmf({Var::U, Var::Se}, {u_size, spec.nse}, {Var::X}, {spec.nx}, f, "map");
      fill_meta(r, out);
    }
  }
  out.capacity = std::max(0.0, out.capacity);
  return out;
}

ChannelSpec fold_action_into_state(const ChannelSpec& spec) {
  spec.validate();
  const std::size_t nse2 = spec.nse * spec.na;
  std::vector<double> state(spec.na * nse2 * spec.nsd, 0.0);
  for (std::size_t a = 0; a < spec.na; ++a) {
    for (std::size_t se = 0; se < spec.nse; ++se) {
      for (std::size_t sd = 0; sd < spec.nsd; ++sd) {
        state[(a * nse2 + se * spec.na + a) * spec.nsd + sd] = spec.p_state(a, se, sd);
      }
    }
  }
  std::vector<double> main;
  main.reserve(spec.nx * nse2 * spec.nsd * spec.ny);
  for (std::size_t x = 0; x < spec.nx; ++x) {
    for (std::size_t se = 0; se < spec.nse; ++se) {
      for (std::size_t a = 0; a < spec.na; ++a) {
        for (std::size_t sd = 0; sd < spec.nsd; ++sd) {
          for (std::size_t y = 0; y < spec.ny; ++y) main.push_back(spec.p_y(x, se, sd, a, y));
        }
      }
    }
  }
  return make_channel_spec(spec.na, nse2, spec.nsd, spec.nx, spec.ny, std::move(state), std::move(main),
                           false);
}

ImproveResult degenerate_improve(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX1) {
  spec.validate();
  if (spec.action_dependent) {
    throw InvalidInput("degenerate_improve: the main channel must not depend on the action");
  }
  const auto uniform_x = CondPmf::uniform({Var::A, Var::Se}, {spec.na, spec.nse}, {Var::X}, {spec.nx});
  const auto probe = assemble_channel_joint(spec, Pmf::uniform(spec.na), uniform_x);
  if (verify_markov(probe, {Var::Se}, {Var::A}, {Var::Sd}) > kMarkovTol ||
      verify_markov(probe, {Var::Y}, {Var::X, Var::Sd}, {Var::Se}) > kMarkovTol) {
    throw InvalidInput("degenerate_improve: spec violates Se - A - Sd or Y - (X,Sd) - Se");
  }

  std::vector<double> px2(spec.na * spec.nse * spec.nx, 0.0);
  for (std::size_t a = 0; a < spec.na; ++a) {
    std::vector<double> avg(spec.nx, 0.0);
    for (std::size_t se = 0; se < spec.nse; ++se) {
      double pse = 0.0;
      for (std::size_t sd = 0; sd < spec.nsd; ++sd) pse += spec.p_state(a, se, sd);
      const auto row = pX1.row(a * spec.nse + se);
      for (std::size_t x = 0; x < spec.nx; ++x) avg[x] += pse * row[x];
    }
    for (std::size_t se = 0; se < spec.nse; ++se) {
      std::copy(avg.begin(), avg.end(), px2.begin() + static_cast<std::ptrdiff_t>((a * spec.nse + se) * spec.nx));
    }
  }
  ImproveResult out;
  out.pX2 = CondPmf({Var::A, Var::Se}, {spec.na, spec.nse}, {Var::X}, {spec.nx}, std::move(px2),
                    "averaged input");
  const auto j1 = assemble_channel_joint(spec, pA, pX1);
  const auto j2 = assemble_channel_joint(spec, pA, out.pX2);
  out.rate1 = channel_objective(j1);
  out.rate2 = channel_objective(j2);
  out.slack2 = condition_slack(j2);
  return out;
}

MixtureReport rmod_mixture_check(const ChannelSpec& spec, const InputPair& p1, const InputPair& p2,
                                 double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("rmod_mixture_check: alpha outside [0,1]");
  const auto j1 = assemble_channel_joint(spec, p1.pA, p1.pX);
  const auto j2 = assemble_channel_joint(spec, p2.pA, p2.pX);
  std::vector<double> mix(j1.cells());
  for (std::size_t c = 0; c < mix.size(); ++c) mix[c] = alpha * j1.probs()[c] + (1.0 - alpha) * j2.probs()[c];
  const JointDist jm(j1.vars(), j1.sizes(), std::move(mix), "mixture joint");

  MixtureReport r;
  r.objective_mix = channel_objective(jm);
  r.objective_avg = alpha * channel_objective(j1) + (1.0 - alpha) * channel_objective(j2);
  r.slack_mix = condition_slack(jm);
  r.slack_avg = alpha * condition_slack(j1) + (1.0 - alpha) * condition_slack(j2);
  r.objective_violation = std::max(0.0, r.objective_avg - r.objective_mix);
  r.slack_violation = std::max(0.0, r.slack_avg - r.slack_mix);
  r.holds = r.objective_violation <= 1e-9 && r.slack_violation <= 1e-9;
  return r;
}

}  // namespace itact
