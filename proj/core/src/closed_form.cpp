#include "itact/closed_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/rng.hpp"
#include "itact/source_rdc.hpp"
#include "itact/specs.hpp"

namespace itact {

namespace {

constexpr std::size_t kBetaGrid = 2001;
constexpr std::size_t kAsymmetrySteps = 10;
constexpr std::size_t kSplitGrid = 101;
constexpr std::size_t kWzTable = 41;
constexpr std::size_t kRewriteAxis = 41;
constexpr std::size_t kRewriteRestarts = 16;
constexpr double kGolden = 0.6180339887498949;

double h(double p) { return binary_entropy(std::clamp(p, 0.0, 1.0)); }

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput(std::string(what) + " outside [0,1]");
}

// Golden-section minimum of a unimodal f on [lo, hi]; returns the argmin.
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 100) {
  double a = lo, b = hi;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// Scan then golden-polish inside the bracket of the best grid point.
std::pair<double, double> scan_min(const std::function<double(double)>& f, double lo, double hi,
                                   std::size_t points) {
  if (hi <= lo) return {lo, f(lo)};
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best > 0 ? best - 1 : 0);
  const double b = lo + step * static_cast<double>(std::min(best + 1, points - 1));
  const double x = golden_min(f, a, b);
  const double v = f(x);
  if (v < best_v) return {x, v};
  return {lo + step * static_cast<double>(best), best_v};
}

double rate_no_si(double q, double D) {
  const double m = std::min(q, 1.0 - q);
  if (D >= m) return 0.0;
  return std::max(0.0, h(q) - h(D));
}

// Wyner-Ziv rate of Bern(q) with BSC(p0) decoder observation, tabulated over
// D on [0, min(q, 1-q)] by the general solver and interpolated linearly.
class WzTable {
 public:
  WzTable(double q, double p0) : m_(std::min(q, 1.0 - q)) {
    const auto spec = make_source_spec(Pmf({1.0 - q, q}), 1, 1, 2, 2,
                                       {1.0 - p0, p0, p0, 1.0 - p0}, {0, 1, 1, 0}, {0});
    OptOptions o;
    o.starts = 8;
    o.seed = 11;
    values_.resize(kWzTable);
    for (std::size_t i = 0; i < kWzTable; ++i) {
      const double D = m_ * static_cast<double>(i) / (kWzTable - 1);
      const RdcQuery query{D, 0.0};
      const auto cr = rd_ac_cr(spec, query, o);
      values_[i] = std::min(rd_ac(spec, query, 0, o, &cr).rate, r_cr_binary_general(q, p0, D));
    }
    for (std::size_t i = 1; i < kWzTable; ++i) values_[i] = std::min(values_[i], values_[i - 1]);
  }

  double operator()(double D) const {
    if (m_ <= 0.0 || D >= m_) return 0.0;
    const double t = D / m_ * (kWzTable - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(t), kWzTable - 2);
    const double w = t - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }

 private:
  double m_;
  std::vector<double> values_;
};

double curve_value(const BinaryExampleParams& prm, double D, double s,
                   const std::function<double(double)>& r1) {
  const double C = prm.C;
  if (C <= 0.0) return rate_no_si(0.5, D);
  const double c0 = C - s, c1 = C + s;
  const double ixa = std::max(0.0, h(C) - 0.5 * (h(c0) + h(c1)));
  if (C >= 1.0) return ixa + r1(D);
  const double q0 = 0.5 * (1.0 - c1) / (1.0 - C);
  auto f = [&](double d1) {
    const double d0 = std::max(0.0, (D - C * d1) / (1.0 - C));
    return (1.0 - C) * rate_no_si(q0, d0) + C * r1(d1);
  };
  const double hi = std::min(D / C, 0.5);
  return ixa + scan_min(f, 0.0, hi, kSplitGrid).second;
}

}  // namespace

double r_cr_binary(double p0, double D) {
  require_unit(p0, "p0");
  if (!(D >= 0.0 && D <= 0.5)) throw InvalidInput("r_cr_binary: D outside [0, 0.5]");
  return std::max(0.0, h(star(p0, D)) - h(D));
}

WzEnvelopeResult r_wz_binary(double p0, double D) {
  require_unit(p0, "p0");
  if (!(D >= 0.0)) throw InvalidInput("r_wz_binary: D must be >= 0");
  WzEnvelopeResult out;
  if (D >= p0) {
    out.theta = 0.0;
    out.beta = p0;
    return out;
  }
  auto g = [&](double beta) { return h(star(p0, beta)) - h(beta); };
  auto f = [&](double beta) { return (p0 - D) / (p0 - beta) * g(beta); };
  const double hi = std::min(D, p0);
  const auto [beta, rate] = scan_min([&](double b) { return f(std::min(b, hi)); }, 0.0, hi, kBetaGrid);
  out.beta = beta;
  out.theta = (p0 - D) / (p0 - beta);
  out.rate = std::max(0.0, rate);
  return out;
}

double r_cr_binary_general(double q, double p0, double D) {
  require_unit(q, "q");
  require_unit(p0, "p0");
  if (!(D >= 0.0)) throw InvalidInput("r_cr_binary_general: D must be >= 0");
  if (D >= std::min(q, 1.0 - q)) return 0.0;
  const double ps1 = q * (1.0 - p0) + (1.0 - q) * p0;  // P(sd = 1)
  const double x1_given[2] = {ps1 < 1.0 ? q * p0 / (1.0 - ps1) : 0.0,
                              ps1 > 0.0 ? q * (1.0 - p0) / ps1 : 0.0};
  // a = P(xhat=1|x=0), b = P(xhat=0|x=1), (1-q) a + q b = D
  auto rate = [&](double a) {
    const double b = std::clamp((D - (1.0 - q) * a) / q, 0.0, 1.0);
    double hxs = 0.0;
    const double psd[2] = {1.0 - ps1, ps1};
    for (int sd = 0; sd < 2; ++sd) {
      const double x1 = x1_given[sd];
      hxs += psd[sd] * h((1.0 - x1) * a + x1 * (1.0 - b));
    }
    return hxs - (1.0 - q) * h(a) - q * h(b);
  };
  const double lo = std::max(0.0, (D - q) / (1.0 - q));
  const double hi = std::min(1.0, D / (1.0 - q));
  return std::max(0.0, rate(golden_min(rate, lo, hi, 200)));
}

std::vector<CurvePoint> binary_rd_curve(const BinaryExampleParams& prm, const std::vector<double>& D_grid) {
  require_unit(prm.C, "C");
  if (!(prm.p0 >= 0.0 && prm.p0 <= 0.5)) throw InvalidInput("p0 outside [0, 0.5]");
  for (double D : D_grid) {
    if (!(D >= 0.0 && D <= 0.5)) throw InvalidInput("binary_rd_curve: D outside [0, 0.5]");
  }
  const double smax = std::min(prm.C, 1.0 - prm.C);
  const std::size_t steps = smax > 0.0 ? kAsymmetrySteps : 0;

  // Per-asymmetry R1 for the action-1 branch; Wyner-Ziv tables are built lazily.
  std::map<std::size_t, WzTable> wz;
  auto r1_for = [&](std::size_t k, bool cr) -> std::function<double(double)> {
    const double s = smax * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(steps, 1));
    const double q1 = prm.C > 0.0 ? 0.5 * (prm.C + s) / prm.C : 0.5;
    if (cr) {
      if (k == 0) return [&](double d) { return r_cr_binary(prm.p0, std::min(d, 0.5)); };
      return [q1, &prm](double d) { return r_cr_binary_general(q1, prm.p0, d); };
    }
    if (k == 0) return [&](double d) { return r_wz_binary(prm.p0, d).rate; };
    auto it = wz.find(k);
    if (it == wz.end()) it = wz.emplace(k, WzTable(q1, prm.p0)).first;
    const WzTable* t = &it->second;
    return [t](double d) { return (*t)(d); };
  };

  std::vector<CurvePoint> out;
  for (double D : D_grid) {
    CurvePoint pt{D, prm.C, std::numeric_limits<double>::infinity(), 0.0};
    // without CR every CR scheme is still admissible, so both families are searched
    const std::vector<bool> modes = prm.cr ? std::vector<bool>{true} : std::vector<bool>{true, false};
    for (bool cr : modes) {
      for (std::size_t k = 0; k <= steps; ++k) {
        const double s = smax * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(steps, 1));
        const double v = curve_value(prm, D, s, r1_for(k, cr));
        if (v < pt.rate) {
          pt.rate = v;
          pt.asymmetry = s;
        }
      }
    }
    pt.rate = std::max(0.0, pt.rate);
    out.push_back(pt);
  }
  return out;
}

RewriteValue rewrite_objective(const RewriteParams& x) {
  for (double v : {x.delta, x.pa, x.p, x.q, x.r, x.s}) require_unit(v, "rewrite parameter");
  const double d = x.delta, pa = x.pa, p = x.p, q = x.q, r = x.r, s = x.s;
  const double hy = h((1 - d) * (1 - pa) * (1 - d + d * p) + d * pa * (q + d - d * q) +
                      d * (1 - d) * (1 - r + r * pa - s * pa));
  const double hya = (1 - pa) * h((1 - d) * (p + (1 - p) * (1 - d) + (1 - r) * d)) +
                     pa * h(d * (q + (1 - q) * d + (1 - s) * (1 - d)));
  const double w1 = (1 - p) * (1 - d) * (1 - pa) + (1 - r) * d * (1 - pa);
  const double w2 = (1 - q) * d * pa + (1 - s) * (1 - d) * pa;
  double tail = -h(d);
  if (w1 > 0) tail += w1 * (h((1 - p) * (1 - d) * (1 - pa) / w1) - h(d));
  if (w2 > 0) tail += w2 * (h((1 - q) * d * pa / w2) - h(d));
  return {hy + tail, hya + tail};
}

Pmf rewrite_action_pmf(const RewriteParams& x) { return Pmf({1.0 - x.pa, x.pa}); }

CondPmf rewrite_input_cond(const RewriteParams& x) {
  return CondPmf({Var::A, Var::Se}, {2, 2}, {Var::X}, {2},
                 {x.p, 1 - x.p, x.r, 1 - x.r, x.q, 1 - x.q, x.s, 1 - x.s}, "rewrite input");
}

CapResult rewrite_capacity(double delta, bool constrained, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 0.5)) throw InvalidInput("rewrite_capacity: delta outside [0, 0.5]");
  using Point = std::array<double, 5>;  // pa, p, q, r, s
  auto eval = [&](const Point& v) {
    return rewrite_objective({delta, v[0], v[1], v[2], v[3], v[4]});
  };
  auto feasible = [&](const RewriteValue& rv) { return !constrained || rv.slack >= -1e-12; };

  // single coordinates plus the two pairs that keep X independent of Se
  const std::vector<std::vector<int>> directions{{0}, {1}, {2}, {3}, {4}, {1, 3}, {2, 4}};

  auto refine = [&](Point x) {
    if (!feasible(eval(x))) {
      x[1] = x[3] = 0.5 * (x[1] + x[3]);
      x[2] = x[4] = 0.5 * (x[2] + x[4]);
    }
    double best = eval(x).objective;
    double width = 0.5;
    for (int sweep = 0; sweep < 200 && width > 1e-12; ++sweep) {
      bool moved = false;
      for (const auto& dir : directions) {
        Point cand_best = x;
        for (std::size_t i = 0; i < kRewriteAxis; ++i) {
          const double off = width * (2.0 * static_cast<double>(i) / (kRewriteAxis - 1) - 1.0);
          Point c = x;
          for (int k : dir) c[static_cast<std::size_t>(k)] = std::clamp(x[static_cast<std::size_t>(dir[0])] + off, 0.0, 1.0);
          const auto rv = eval(c);
          if (feasible(rv) && rv.objective > best + 1e-15) {
            best = rv.objective;
            cand_best = c;
            moved = true;
          }
        }
        x = cand_best;
      }
      if (!moved) width *= 0.5;
    }
    return std::pair{x, best};
  };

  std::vector<Point> starts{{0.5, 0.5, 0.5, 0.5, 0.5}};
  CounterRng rng(seed, 0);
  for (std::size_t i = 0; i < kRewriteRestarts; ++i) {
    Point p;
    for (double& v : p) v = rng.uniform();
    starts.push_back(p);
  }
  Point best_x{};
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const auto [x, v] = refine(s);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }

  const RewriteParams prm{delta, best_x[0], best_x[1], best_x[2], best_x[3], best_x[4]};
  CapResult out;
  out.capacity = std::max(0.0, best);
  out.arg_pA = rewrite_action_pmf(prm);
  out.arg_pX = rewrite_input_cond(prm);
  out.slack = rewrite_objective(prm).slack;
  out.converged = true;
  out.starts_used = starts.size();
  return out;
}

}  // namespace itact
