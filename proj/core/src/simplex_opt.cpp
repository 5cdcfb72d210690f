#include "itact/simplex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "itact/error.hpp"
#include "itact/parallel.hpp"
#include "itact/rng.hpp"

namespace itact {

namespace {

constexpr double kDiffStep = 1e-5;
constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxOuter = 40;
constexpr std::size_t kGridAxis = 41;
constexpr std::size_t kGridLimit = 100000;
constexpr std::size_t kGridSeeds = 4;
constexpr double kMultimodalSpread = 1e-3;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project_row(std::span<double> v) {
  const std::size_t k = v.size();
  if (k == 1) {
    v[0] = 1.0;
    return;
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(x - theta, 0.0);
    sum += x;
  }
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  } else {
    for (double& x : v) x = 1.0 / static_cast<double>(k);
  }
}

double eval_fn(const ScalarFn& fn, std::span<const double> x) {
  if (fn.value) return fn.value(x);
  std::vector<double> scratch(x.size());
  return fn.value_grad(x, scratch);
}

double eval_fn_grad(const ScalarFn& fn, std::span<const double> x, std::span<double> g) {
  if (fn.value_grad) return fn.value_grad(x, g);
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + kDiffStep;
    const double fp = fn.value(xp);
    xp[i] = x[i] - kDiffStep;
    const double fm = fn.value(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * kDiffStep);
  }
  return fn.value(x);
}

struct StartOutcome {
  bool feasible = false;
  double merit = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  bool converged = false;
  std::size_t iterations = 0;
};

class LocalSolver {
 public:
  LocalSolver(const OptProblem& p, const OptOptions& o)
      : p_(p), o_(o), n_(shape_dim(p.shape)), sigma_(p.sense == Sense::Maximize ? -1.0 : 1.0),
        lambda_(p.constraints.size(), 0.0) {}

  StartOutcome run(std::vector<double> x) {
    StartOutcome out;
    project_onto_shape(p_.shape, x);
    consider(x, out);

    if (p_.constraints.empty()) {
      out.converged = descend(x, out.iterations);
      consider(x, out);
      return out;
    }

    double prev = std::numeric_limits<double>::infinity();
    bool inner_ok = false;
    double comp = 0.0;
    for (std::size_t outer = 0; outer < kMaxOuter; ++outer) {
      inner_ok = descend(x, out.iterations);
      comp = 0.0;
      for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
        const double g = eval_fn(p_.constraints[i], x);
        comp = std::max(comp, std::abs(std::min(g, lambda_[i] / rho_)));
        lambda_[i] = std::max(0.0, lambda_[i] - rho_ * g);
      }
      consider(x, out);
      if (comp <= 1e-9 && inner_ok) break;
      if (comp > 0.25 * prev) rho_ = std::min(rho_ * 10.0, 1e9);
      prev = comp;
    }
    out.converged = inner_ok && comp <= 10.0 * o_.feasibility_tol;

    if (!is_feasible(x) && !p_.anchor.empty()) {
      repair(x);
      consider(x, out);
    }
    return out;
  }

 private:
  bool is_feasible(std::span<const double> x) const {
    for (const auto& c : p_.constraints) {
      if (!(eval_fn(c, x) >= -o_.feasibility_tol)) return false;
    }
    return true;
  }

  void consider(const std::vector<double>& x, StartOutcome& out) const {
    if (!is_feasible(x)) return;
    const double m = sigma_ * eval_fn(p_.objective, x);
    if (!std::isfinite(m)) throw OptimizerFailure("objective is not finite at a feasible point");
    if (!out.feasible || m < out.merit) {
      out.feasible = true;
      out.merit = m;
      out.x = x;
    }
  }

  // Bisection on the segment toward the anchor for the closest feasible point.
  void repair(std::vector<double>& x) const {
    std::vector<double> anchor = p_.anchor;
    project_onto_shape(p_.shape, anchor);
    if (!is_feasible(anchor)) return;
    std::vector<double> trial(n_);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < n_; ++i) trial[i] = (1.0 - mid) * x[i] + mid * anchor[i];
      if (is_feasible(trial)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) x[i] = (1.0 - hi) * x[i] + hi * anchor[i];
  }

  double merit_grad(std::span<const double> x, std::span<double> g) const {
    double value = sigma_ * eval_fn_grad(p_.objective, x, g);
    for (double& v : g) v *= sigma_;
    if (p_.constraints.empty()) return value;
    std::vector<double> gc(n_);
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
      const double c = eval_fn_grad(p_.constraints[i], x, gc);
      const double t = lambda_[i] - rho_ * c;
      if (t > 0.0) {
        value += (t * t - lambda_[i] * lambda_[i]) / (2.0 * rho_);
        for (std::size_t k = 0; k < n_; ++k) g[k] -= t * gc[k];
      } else {
        value -= lambda_[i] * lambda_[i] / (2.0 * rho_);
      }
    }
    return value;
  }

  // Projected gradient with Barzilai-Borwein steps and Armijo backtracking.
  bool descend(std::vector<double>& x, std::size_t& iterations) const {
    std::vector<double> g(n_), gn(n_), xn(n_), d(n_), trial(n_);
    double value = merit_grad(x, g);
    if (!std::isfinite(value)) return false;
    double alpha = 1.0;
    int quiet = 0;
    for (std::size_t it = 0; it < o_.max_iter; ++it) {
      ++iterations;
      for (std::size_t i = 0; i < n_; ++i) trial[i] = x[i] - g[i];
      project_onto_shape(p_.shape, trial);
      double stat = 0.0;
      for (std::size_t i = 0; i < n_; ++i) stat = std::max(stat, std::abs(trial[i] - x[i]));
      if (stat <= 1e-2 * o_.tol) return true;

      for (std::size_t i = 0; i < n_; ++i) d[i] = x[i] - alpha * g[i];
      project_onto_shape(p_.shape, d);
      for (std::size_t i = 0; i < n_; ++i) d[i] -= x[i];
      double slope = dot(g, d);
      if (!(slope < 0.0)) {
        for (std::size_t i = 0; i < n_; ++i) d[i] = trial[i] - x[i];
        slope = dot(g, d);
        if (!(slope < 0.0)) return true;
      }

      double t = 1.0;
      double next = 0.0;
      for (;;) {
        for (std::size_t i = 0; i < n_; ++i) xn[i] = x[i] + t * d[i];
        next = merit_grad(xn, gn);
        if (std::isfinite(next) && next <= value + kArmijo * t * slope) break;
        t *= 0.5;
        if (t < 1e-14) return true;
      }

      double sy = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double s = xn[i] - x[i];
        ss += s * s;
        sy += s * (gn[i] - g[i]);
      }
      alpha = sy > 1e-300 ? std::clamp(ss / sy, 1e-10, 1e6) : 1e6;

      const double gain = value - next;
      x.swap(xn);
      g.swap(gn);
      value = next;
      quiet = gain <= 1e-2 * o_.tol * (1.0 + std::abs(value)) ? quiet + 1 : 0;
      if (quiet >= 3) return true;
    }
    return false;
  }

  const OptProblem& p_;
  const OptOptions& o_;
  std::size_t n_;
  double sigma_;
  double rho_ = 10.0;
  std::vector<double> lambda_;
};

// All lattice points with denominator kGridAxis-1 on one simplex of width k.
void lattice(std::size_t k, std::size_t remaining, std::vector<std::size_t>& cur,
             std::vector<std::vector<double>>& out) {
  if (cur.size() + 1 == k) {
    cur.push_back(remaining);
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<double>(cur[i]) / (kGridAxis - 1);
    out.push_back(std::move(p));
    cur.pop_back();
    return;
  }
  for (std::size_t v = 0; v <= remaining; ++v) {
    cur.push_back(v);
    lattice(k, remaining - v, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<double>> grid_seeds(const OptProblem& p, const OptOptions& o) {
  const std::size_t dof = shape_dof(p.shape);
  if (dof == 0 || dof > 3) return {};
  std::vector<std::vector<std::vector<double>>> axes;
  std::size_t total = 1;
  for (const auto& b : p.shape) {
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> cur;
    lattice(b.size, kGridAxis - 1, cur, pts);
    for (std::size_t r = 0; r < b.rows; ++r) {
      total *= pts.size();
      axes.push_back(pts);
    }
  }
  if (total > kGridLimit) return {};

  const double sigma = p.sense == Sense::Maximize ? -1.0 : 1.0;
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<std::size_t> digit(axes.size(), 0);
  std::vector<double> x;
  for (std::size_t id = 0; id < total; ++id) {
    x.clear();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& pt = axes[a][digit[a]];
      x.insert(x.end(), pt.begin(), pt.end());
    }
    bool ok = true;
    for (const auto& c : p.constraints) ok = ok && eval_fn(c, x) >= -o.feasibility_tol;
    if (ok) {
      const double m = sigma * eval_fn(p.objective, x);
      if (std::isfinite(m)) scored.emplace_back(m, id);
    }
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++digit[a] < axes[a].size()) break;
      digit[a] = 0;
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<std::vector<double>> seeds;
  for (std::size_t s = 0; s < scored.size() && seeds.size() < kGridSeeds; ++s) {
    std::size_t id = scored[s].second;
    std::vector<double> pt;
    std::vector<std::size_t> dg(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      dg[a] = id % axes[a].size();
      id /= axes[a].size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      pt.insert(pt.end(), axes[a][dg[a]].begin(), axes[a][dg[a]].end());
    }
    seeds.push_back(std::move(pt));
  }
  return seeds;
}

std::vector<double> random_point(const SimplexShape& shape, std::uint64_t seed, std::size_t index) {
  std::vector<double> x;
  if (index == 0) {
    for (const auto& b : shape) {
      for (std::size_t r = 0; r < b.rows; ++r) {
        x.insert(x.end(), b.size, 1.0 / static_cast<double>(b.size));
      }
    }
    return x;
  }
  CounterRng rng(seed, index);
  for (const auto& b : shape) {
    for (std::size_t r = 0; r < b.rows; ++r) {
      auto row = rng.dirichlet(b.size);
      x.insert(x.end(), row.begin(), row.end());
    }
  }
  return x;
}

}  // namespace

std::size_t shape_dim(const SimplexShape& shape) {
  std::size_t n = 0;
  for (const auto& b : shape) n += b.rows * b.size;
  return n;
}

std::size_t shape_dof(const SimplexShape& shape) {
  std::size_t n = 0;
  for (const auto& b : shape) n += b.rows * (b.size - 1);
  return n;
}

void project_onto_shape(const SimplexShape& shape, std::span<double> x) {
  std::size_t off = 0;
  for (const auto& b : shape) {
    for (std::size_t r = 0; r < b.rows; ++r) {
      project_row(x.subspan(off, b.size));
      off += b.size;
    }
  }
}

Pmf project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("project_to_simplex: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("project_to_simplex: non-finite entry");
  }
  std::vector<double> out(v.begin(), v.end());
  project_row(out);
  return Pmf(std::move(out));
}

OptResult optimize(const OptProblem& problem, const OptOptions& opts) {
  if (opts.starts < 1) throw InvalidInput("optimize: starts must be >= 1");
  if (!(opts.tol > 0.0)) throw InvalidInput("optimize: tol must be > 0");
  if (problem.shape.empty()) throw InvalidInput("optimize: empty shape");
  for (const auto& b : problem.shape) {
    if (b.rows == 0 || b.size == 0) throw InvalidInput("optimize: simplex sizes must be >= 1");
  }
  if (!problem.objective.value && !problem.objective.value_grad) {
    throw InvalidInput("optimize: missing objective");
  }
  const std::size_t n = shape_dim(problem.shape);

  std::vector<std::vector<double>> preset;
  for (const auto& p : opts.initial_points) {
    if (p.size() != n) throw InvalidInput("optimize: initial point has the wrong dimension");
    preset.push_back(p);
  }
  for (auto& s : grid_seeds(problem, opts)) preset.push_back(std::move(s));

  std::vector<StartOutcome> outcomes(opts.starts);
  parallel_for(opts.starts, opts.threads, [&](std::size_t s) {
    auto x0 = s < preset.size() ? preset[s] : random_point(problem.shape, opts.seed, s - preset.size());
    LocalSolver solver(problem, opts);
    outcomes[s] = solver.run(std::move(x0));
  });

  std::size_t best = opts.starts;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any_converged = false;
  for (std::size_t s = 0; s < opts.starts; ++s) {
    const auto& o = outcomes[s];
    if (!o.feasible) continue;
    if (best == opts.starts || o.merit < outcomes[best].merit) best = s;
    if (o.converged) {
      any_converged = true;
      lo = std::min(lo, o.merit);
      hi = std::max(hi, o.merit);
    }
  }
  if (best == opts.starts) throw Infeasible("optimize: no start reached the feasible set");

  OptResult r;
  const double sigma = problem.sense == Sense::Maximize ? -1.0 : 1.0;
  r.value = sigma * outcomes[best].merit;
  r.argument = outcomes[best].x;
  for (const auto& c : problem.constraints) {
    const double slack = eval_fn(c, r.argument);
    r.constraint_slacks.push_back(slack);
    r.active_flags.push_back(slack <= opts.activity_tol);
  }
  r.starts_used = opts.starts;
  r.iterations = outcomes[best].iterations;
  r.best_start = best;
  r.converged = any_converged;
  r.multimodal = any_converged && hi - lo > kMultimodalSpread;
  return r;
}

std::vector<SweepRow> sweep(const std::function<OptProblem(std::span<const double>)>& family,
                            const std::vector<std::vector<double>>& grid, const OptOptions& opts) {
  if (grid.empty()) throw InvalidInput("sweep: empty grid");
  std::vector<SweepRow> rows;
  std::vector<double> warm;
  for (const auto& params : grid) {
    SweepRow row;
    row.params = params;
    try {
      OptProblem problem = family(params);
      OptOptions o = opts;
      if (warm.size() == shape_dim(problem.shape)) o.initial_points.insert(o.initial_points.begin(), warm);
      row.result = optimize(problem, o);
      warm = row.result->argument;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace itact
