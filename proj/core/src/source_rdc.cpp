#include "itact/source_rdc.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <sstream>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/product_model.hpp"

namespace itact {

namespace {

constexpr double kBudgetSlack = 1e-12;

struct SourceModel {
  std::shared_ptr<ProductModel> model;
  std::vector<double> distortion;  // per cell, for the Xhat variant
  std::vector<double> cost;        // per cell
};

SourceModel build_model(const SourceSpec& s, Var last, std::size_t last_size) {
  SourceModel sm;
  sm.model = std::make_shared<ProductModel>(VarList{Var::X, Var::A, Var::Se, Var::Sd, last},
                                            std::vector<std::size_t>{s.nx, s.na, s.nse, s.nsd, last_size});
  auto& m = *sm.model;
  m.multiply_fixed({Var::X}, s.source.probs());
  m.multiply_fixed({Var::X, Var::A, Var::Se, Var::Sd}, s.si_channel.table());
  m.add_block({Var::X}, Var::A);
  m.add_block({Var::X, Var::Se, Var::A}, last);

  const auto a_of = m.projection({Var::A});
  sm.cost.resize(m.cells());
  for (std::size_t c = 0; c < m.cells(); ++c) sm.cost[c] = s.cost[a_of[c]];
  if (last == Var::Xhat) {
    const auto xxh_of = m.projection({Var::X, Var::Xhat});
    sm.distortion.resize(m.cells());
    for (std::size_t c = 0; c < m.cells(); ++c) sm.distortion[c] = s.distortion[xxh_of[c]];
  }
  return sm;
}

void check_budgets(const SourceSpec& spec, const RdcQuery& q) {
  spec.validate();
  if (!(q.D >= 0.0) || !(q.C >= 0.0)) throw InvalidInput("rdc query: D and C must be >= 0");
  const double dmin = min_distortion(spec);
  const double cmin = min_cost(spec);
  if (q.D < dmin - kBudgetSlack || q.C < cmin - kBudgetSlack) {
    std::ostringstream os;
    os << "infeasible budgets (D=" << q.D << ", C=" << q.C << "); minimum distortion " << dmin
       << ", minimum cost " << cmin;
    throw Infeasible(os.str());
  }
}

std::size_t cheapest_action(const SourceSpec& s) {
  return static_cast<std::size_t>(std::min_element(s.cost.begin(), s.cost.end()) - s.cost.begin());
}

std::size_t best_reconstruction(const SourceSpec& s, std::size_t x) {
  std::size_t best = 0;
  for (std::size_t xh = 1; xh < s.nxh; ++xh) {
    if (s.d(x, xh) < s.d(x, best)) best = xh;
  }
  return best;
}

// Deterministic point meeting both minima: cheapest action, best reconstruction of x.
std::vector<double> anchor_point(const SourceSpec& s, std::size_t last_size) {
  std::vector<double> x(s.nx * s.na, 0.0);
  const std::size_t a0 = cheapest_action(s);
  for (std::size_t xi = 0; xi < s.nx; ++xi) x[xi * s.na + a0] = 1.0;
  for (std::size_t xi = 0; xi < s.nx; ++xi) {
    const std::size_t xh = best_reconstruction(s, xi);
    for (std::size_t r = 0; r < s.nse * s.na; ++r) {
      std::vector<double> row(last_size, 0.0);
      row[xh < last_size ? xh : 0] = 1.0;
      x.insert(x.end(), row.begin(), row.end());
    }
  }
  return x;
}

CondPmf block_cond(const ProductModel& m, std::span<const double> x, std::size_t b, VarList cond,
                   std::vector<std::size_t> cond_sizes, Var out, std::size_t out_size) {
  const auto blk = m.block(x, b);
  return CondPmf(std::move(cond), std::move(cond_sizes), {out}, {out_size},
                 std::vector<double>(blk.begin(), blk.end()), "optimizer argument");
}

enum class CrForm { Standard, Alternative, ActionOnly, Steinberg };

RdcResult solve_cr(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts, CrForm form) {
  check_budgets(spec, q);
  const auto sm = build_model(spec, Var::Xhat, spec.nxh);
  const auto& m = *sm.model;

  InfoExpr objective(m);
  switch (form) {
    case CrForm::Standard:
      objective.mutual_info(1, {Var::X}, {Var::A})
          .mutual_info(1, {Var::Xhat}, {Var::X, Var::Se}, {Var::A})
          .mutual_info(-1, {Var::Xhat}, {Var::Sd}, {Var::A});
      break;
    case CrForm::Alternative:
      objective.mutual_info(1, {Var::X}, {Var::A})
          .mutual_info(1, {Var::Xhat}, {Var::X, Var::Se}, {Var::A, Var::Sd});
      break;
    case CrForm::ActionOnly:
      objective.mutual_info(1, {Var::X}, {Var::A});
      break;
    case CrForm::Steinberg:
      objective.mutual_info(1, {Var::Xhat}, {Var::X}, {Var::Sd});
      break;
  }
  InfoExpr dist(m), cost(m);
  dist.constant(q.D).expectation(-1.0, sm.distortion);
  cost.constant(q.C).expectation(-1.0, sm.cost);

  OptProblem p;
  p.shape = m.shape();
  p.sense = Sense::Minimize;
  p.objective = lift(sm.model, objective);
  p.constraints = {lift(sm.model, dist), lift(sm.model, cost)};
  p.anchor = anchor_point(spec, spec.nxh);
  const auto r = optimize(p, opts);

  RdcResult out;
  out.rate = std::max(0.0, r.value);
  out.arg_paX = block_cond(m, r.argument, 0, {Var::X}, {spec.nx}, Var::A, spec.na);
  out.arg_pXhat = block_cond(m, r.argument, 1, {Var::X, Var::Se, Var::A},
                             {spec.nx, spec.nse, spec.na}, Var::Xhat, spec.nxh);
  out.achieved_distortion = q.D - r.constraint_slacks[0];
  out.achieved_cost = q.C - r.constraint_slacks[1];
  out.converged = r.converged;
  out.multimodal = r.multimodal;
  out.starts_used = r.starts_used;
  out.iterations = r.iterations;
  return out;
}

// D - sum_{u,sd} min_xh sum_x P(x,u,sd) d(x,xh), decoder chosen per (u,sd) cell.
struct DecoderDistortion {
  const SourceSpec* spec;
  std::size_t nu;
  std::vector<std::size_t> usx_of;  // cell -> (u, sd, x)
  double D;

  std::vector<std::size_t> decode(std::span<const double> q) const {
    const std::size_t nsd = spec->nsd, nx = spec->nx;
    std::vector<std::size_t> g(nu * nsd, 0);
    for (std::size_t us = 0; us < nu * nsd; ++us) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t xh = 0; xh < spec->nxh; ++xh) {
        double e = 0.0;
        for (std::size_t x = 0; x < nx; ++x) e += q[us * nx + x] * spec->d(x, xh);
        if (e < best) {
          best = e;
          g[us] = xh;
        }
      }
    }
    return g;
  }

  std::vector<double> marginal(std::span<const double> cells) const {
    std::vector<double> q(nu * spec->nsd * spec->nx, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) q[usx_of[c]] += cells[c];
    return q;
  }

  double operator()(std::span<const double> cells, std::span<double> dcell) const {
    const auto q = marginal(cells);
    const auto g = decode(q);
    const std::size_t nx = spec->nx;
    double value = D;
    for (std::size_t i = 0; i < q.size(); ++i) value -= q[i] * spec->d(i % nx, g[i / nx]);
    if (!dcell.empty()) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::size_t i = usx_of[c];
        dcell[c] = -spec->d(i % nx, g[i / nx]);
      }
    }
    return value;
  }
};

}  // namespace

double min_distortion(const SourceSpec& spec) {
  double d = 0.0;
  for (std::size_t x = 0; x < spec.nx; ++x) d += spec.source[x] * spec.d(x, best_reconstruction(spec, x));
  return d;
}

double min_cost(const SourceSpec& spec) { return spec.cost[cheapest_action(spec)]; }

RdcResult rd_ac_cr(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts) {
  return solve_cr(spec, q, opts, CrForm::Standard);
}

RdcResult rd_ac_cr_alt(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts) {
  return solve_cr(spec, q, opts, CrForm::Alternative);
}

RegionResult rd_region(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts) {
  const auto r1 = solve_cr(spec, q, opts, CrForm::ActionOnly);
  const auto sum = solve_cr(spec, q, opts, CrForm::Alternative);
  RegionResult out;
  out.r1_min = r1.rate;
  out.sum_min = std::max(sum.rate, r1.rate);
  out.converged = r1.converged && sum.converged;
  return out;
}

RdcResult rd_steinberg(const SourceSpec& spec, double D, const OptOptions& opts) {
  if (spec.na != 1 || spec.nse != 1) {
    throw InvalidInput("rd_steinberg: needs a single action and constant encoder side information");
  }
  return solve_cr(spec, RdcQuery{D, spec.cost[0]}, opts, CrForm::Steinberg);
}

RdcResult rd_ac(const SourceSpec& spec, const RdcQuery& q, std::size_t u_size, const OptOptions& opts,
                const RdcResult* cr_hint) {
  check_budgets(spec, q);
  if (u_size == 0) u_size = std::min(spec.na * spec.nx + 3, kMaxAuxSize);
  if (u_size > kMaxAuxSize) {
    throw InvalidInput("rd_ac: auxiliary alphabet size " + std::to_string(u_size) + " exceeds " +
                       std::to_string(kMaxAuxSize));
  }

  const auto sm = build_model(spec, Var::U, u_size);
  const auto& m = *sm.model;
  InfoExpr objective(m);
  objective.mutual_info(1, {Var::X}, {Var::A})
      .mutual_info(1, {Var::U}, {Var::X, Var::Se}, {Var::A})
      .mutual_info(-1, {Var::U}, {Var::Sd}, {Var::A});
  DecoderDistortion dist{&spec, u_size, m.projection({Var::U, Var::Sd, Var::X}), q.D};
  InfoExpr cost(m);
  cost.constant(q.C).expectation(-1.0, sm.cost);

  OptProblem p;
  p.shape = m.shape();
  p.sense = Sense::Minimize;
  p.objective = lift(sm.model, objective);
  p.constraints = {lift(sm.model, dist), lift(sm.model, cost)};
  p.anchor = anchor_point(spec, u_size);

  OptOptions o = opts;
  if (u_size >= spec.nxh) {
    RdcResult computed;
    if (!cr_hint) {
      computed = rd_ac_cr(spec, q, opts);
      cr_hint = &computed;
    }
    // U = Xhat with g(u, sd) = u reproduces the CR point exactly
    std::vector<double> x(cr_hint->arg_paX.table().begin(), cr_hint->arg_paX.table().end());
    const auto t = cr_hint->arg_pXhat.table();
    for (std::size_t r = 0; r < cr_hint->arg_pXhat.rows(); ++r) {
      for (std::size_t u = 0; u < u_size; ++u) x.push_back(u < spec.nxh ? t[r * spec.nxh + u] : 0.0);
    }
    o.initial_points.insert(o.initial_points.begin(), std::move(x));
  }
  const auto r = optimize(p, o);

  RdcResult out;
  out.rate = std::max(0.0, r.value);
  out.arg_paX = block_cond(m, r.argument, 0, {Var::X}, {spec.nx}, Var::A, spec.na);
  out.arg_pU = block_cond(m, r.argument, 1, {Var::X, Var::Se, Var::A}, {spec.nx, spec.nse, spec.na},
                          Var::U, u_size);
  std::vector<double> cells(m.cells());
  m.joint(r.argument, cells);
  out.decoder = dist.decode(dist.marginal(cells));
  out.achieved_distortion = q.D - r.constraint_slacks[0];
  out.achieved_cost = q.C - r.constraint_slacks[1];
  out.converged = r.converged;
  out.multimodal = r.multimodal;
  out.starts_used = r.starts_used;
  out.iterations = r.iterations;
  return out;
}

double evaluate_cr_rate(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat) {
  const auto j = assemble_source_joint(spec, paX, pXhat);
  return mutual_information(j, {Var::X}, {Var::A}) +
         mutual_information(j, {Var::Xhat}, {Var::X, Var::Se}, {Var::A}) -
         mutual_information(j, {Var::Xhat}, {Var::Sd}, {Var::A});
}

}  // namespace itact
