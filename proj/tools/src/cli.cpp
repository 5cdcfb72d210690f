#include "itact/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "itact/channel_cap.hpp"
#include "itact/checks.hpp"
#include "itact/closed_form.hpp"
#include "itact/coding_sim.hpp"
#include "itact/error.hpp"
#include "itact/parallel.hpp"
#include "itact/source_rdc.hpp"
#include "itact/spec_io.hpp"

namespace itact {

namespace {

enum ExitCode : int { kOk = 0, kInvalid = 1, kNotConverged = 2 };

struct Common {
  std::string spec;
  std::size_t starts = 64;
  std::uint64_t seed = 1;
  std::string out;
  bool timing = false;

  OptOptions opt() const {
    OptOptions o;
    o.starts = starts;
    o.seed = seed;
    return o;
  }
};

void add_common(CLI::App* app, Common& c, bool needs_spec) {
  auto* s = app->add_option("--spec", c.spec, "JSON spec file");
  if (needs_spec) s->required()->check(CLI::ExistingFile);
  app->add_option("--starts", c.starts, "optimizer starts")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output file (stdout when omitted)");
  app->add_flag("--timing", c.timing, "add wall-clock columns (breaks byte-identical reruns)");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path);
  f << text;
}

template <class T>
T expect_spec(const std::string& path, const char* kind) {
  auto any = load_spec(path);
  if (auto* s = std::get_if<T>(&any)) return std::move(*s);
  throw InvalidInput(path + ": expected a " + std::string(kind) + " spec");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> with_timing(std::vector<std::string> cols, bool timing) {
  if (timing) cols.push_back("wall_time_s");
  return cols;
}

// ---------------------------------------------------------------- rdc

struct RdcArgs {
  Common c;
  std::string D, C;
  bool no_cr = false, region = false;
  std::size_t u_size = 0;
};

int cmd_rdc(const RdcArgs& a, std::ostream& out) {
  const auto spec = expect_spec<SourceSpec>(a.c.spec, "source");
  const auto Ds = parse_grid(a.D);
  std::vector<double> Cs;
  if (a.C.empty()) {
    double cmax = 0.0;
    for (double v : spec.cost) cmax = std::max(cmax, v);
    Cs = {cmax};
  } else {
    Cs = parse_grid(a.C);
  }
  const std::string mode = a.region ? "region" : a.no_cr ? "no_cr" : "cr";

  struct Row {
    RdcQuery q;
    double value = NAN, r1 = NAN, dist = NAN, cost = NAN;
    bool converged = false, multimodal = false;
    std::size_t starts = 0, iters = 0;
    std::string status = "ok";
    double secs = 0.0;
  };
  std::vector<Row> rows;
  for (double C : Cs)
    for (double D : Ds) rows.push_back(Row{{D, C}});

  parallel_for(rows.size(), 0, [&](std::size_t i) {
    Row& r = rows[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (a.region) {
        const auto res = rd_region(spec, r.q, a.c.opt());
        r.value = res.sum_min;
        r.r1 = res.r1_min;
        r.converged = res.converged;
      } else {
        const auto res = a.no_cr ? rd_ac(spec, r.q, a.u_size, a.c.opt()) : rd_ac_cr(spec, r.q, a.c.opt());
        r.value = res.rate;
        r.dist = res.achieved_distortion;
        r.cost = res.achieved_cost;
        r.converged = res.converged;
        r.multimodal = res.multimodal;
        r.starts = res.starts_used;
        r.iters = res.iterations;
      }
      if (!r.converged) r.status = "not_converged";
    } catch (const Infeasible&) {
      r.status = "infeasible";
    }
    r.secs = seconds_since(t0);
  });

  std::ostringstream csv;
  CsvWriter w(csv, with_timing({"D", "C", "mode", "value", "r1_min", "achieved_distortion", "achieved_cost",
                                "converged", "multimodal", "starts_used", "iterations", "status"},
                               a.c.timing));
  int code = kOk;
  for (const auto& r : rows) {
    w << r.q.D << r.q.C << mode << r.value << r.r1 << r.dist << r.cost << r.converged << r.multimodal << r.starts
      << r.iters << r.status;
    if (a.c.timing) w << r.secs;
    w.end_row();
    if (r.status == "infeasible") code = kInvalid;
    else if (r.status == "not_converged" && code == kOk) code = kNotConverged;
  }
  emit(csv.str(), a.c.out, out);
  return code;
}

// ---------------------------------------------------------------- capacity

struct CapArgs {
  Common c;
  std::string mode = "ri";
  std::size_t u_size = 0;
};

CapResult solve_capacity(const ChannelSpec& spec, const std::string& mode, std::size_t u_size,
                         const OptOptions& o) {
  if (mode == "ri") return capacity_ri(spec, o);
  if (mode == "unconstrained") return capacity_unconstrained(spec, o);
  if (mode == "message") return capacity_message_only(spec, u_size, o);
  if (mode == "state") return capacity_state_recovery(spec, o);
  return capacity_stegotext(spec, o);
}

int cmd_capacity(const CapArgs& a, std::ostream& out) {
  const auto spec = expect_spec<ChannelSpec>(a.c.spec, "channel");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = solve_capacity(spec, a.mode, a.u_size, a.c.opt());
  const double secs = seconds_since(t0);

  std::ostringstream csv;
  CsvWriter w(csv, with_timing({"mode", "value", "slack", "condition_active", "unconstrained_value", "infeasible",
                                "relaxed", "converged", "multimodal", "starts_used", "iterations"},
                               a.c.timing));
  w << a.mode << r.capacity << r.slack << r.condition_active << r.unconstrained_value.value_or(NAN)
    << r.infeasible << r.relaxed << r.converged << r.multimodal << r.starts_used << r.iterations;
  if (a.c.timing) w << secs;
  w.end_row();
  emit(csv.str(), a.c.out, out);
  return r.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- example

struct ExampleArgs {
  Common c;
  std::string which;
  double p0 = 0.25;
  std::string D = "0:0.0125:21";
  std::string C = "0,0.25,0.5,0.75,1";
  std::string delta = "0.1";
};

int cmd_example(const ExampleArgs& a, std::ostream& out) {
  std::ostringstream csv;
  if (a.which == "binary") {
    const auto Ds = parse_grid(a.D);
    const auto Cs = parse_grid(a.C);
    CsvWriter w(csv, with_timing({"D", "C", "rate_cr", "rate_nocr", "asymmetry_cr", "asymmetry_nocr"}, a.c.timing));
    std::vector<std::vector<CurvePoint>> cr(Cs.size()), nocr(Cs.size());
    std::vector<double> secs(Cs.size());
    parallel_for(Cs.size(), 0, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      cr[i] = binary_rd_curve({a.p0, Cs[i], true}, Ds);
      nocr[i] = binary_rd_curve({a.p0, Cs[i], false}, Ds);
      secs[i] = seconds_since(t0);
    });
    for (std::size_t i = 0; i < Cs.size(); ++i) {
      for (std::size_t k = 0; k < Ds.size(); ++k) {
        w << Ds[k] << Cs[i] << cr[i][k].rate << nocr[i][k].rate << cr[i][k].asymmetry << nocr[i][k].asymmetry;
        if (a.c.timing) w << secs[i];
        w.end_row();
      }
    }
  } else {
    const auto deltas = parse_grid(a.delta);
    CsvWriter w(csv, with_timing({"delta", "value_ri", "value_unconstrained", "slack", "condition_active", "pa",
                                  "p", "q", "r", "s"},
                                 a.c.timing));
    for (double d : deltas) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto con = rewrite_capacity(d, true, a.c.seed);
      const auto unc = rewrite_capacity(d, false, a.c.seed);
      const auto& px = con.arg_pX;
      // rows of P(x|a,se) are ordered (a,se); column 0 is P(x=0)
      w << d << con.capacity << unc.capacity << con.slack << (unc.slack < -kActivityThreshold) << con.arg_pA[1]
        << px.row(0)[0] << px.row(2)[0] << px.row(1)[0] << px.row(3)[0];
      if (a.c.timing) w << seconds_since(t0);
      w.end_row();
    }
  }
  emit(csv.str(), a.c.out, out);
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  Common c;
  std::string which;
  std::string n = "8,12,16";
  double D = 0.1, C = 1.0;
  double rate_frac = 0.8;
  std::optional<double> rate;
  std::optional<double> margin;
  double eps = 0.7;
  std::size_t trials = 2000;
  double floor = 0.01;
  std::uint64_t permute = 0;
  std::string trace;
};

int cmd_simulate(const SimArgs& a, std::ostream& out) {
  std::vector<std::size_t> ns;
  for (double v : parse_grid(a.n)) {
    if (v < 1 || v != std::floor(v)) throw InvalidInput("--n: block lengths must be positive integers");
    ns.push_back(static_cast<std::size_t>(v));
  }
  SimParams p;
  p.epsilon = a.eps;
  p.trials = a.trials;
  p.seed = a.c.seed;
  p.support_floor = a.floor;
  p.permute_codebook = a.permute;
  p.threads = 0;

  std::vector<SimReport> reports;
  std::vector<std::vector<TrialTrace>> traces;
  bool converged = true;
  if (a.which == "source") {
    const auto spec = expect_spec<SourceSpec>(a.c.spec, "source");
    const auto sol = rd_ac_cr(spec, {a.D, a.C}, a.c.opt());
    converged = sol.converged;
    p.rate_margin = a.margin.value_or(0.2);
    for (std::size_t n : ns) {
      p.n = n;
      traces.emplace_back();
      reports.push_back(simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p, &traces.back()));
    }
  } else {
    const auto spec = expect_spec<ChannelSpec>(a.c.spec, "channel");
    const auto cap = capacity_ri(spec, a.c.opt());
    converged = cap.converged;
    const double R = a.rate.value_or(a.rate_frac * cap.capacity);
    p.rate_margin = a.margin.value_or(0.05);
    for (std::size_t n : ns) {
      p.n = n;
      traces.emplace_back();
      reports.push_back(simulate_channel_scheme(spec, cap.arg_pA, cap.arg_pX, R, p, &traces.back()));
    }
  }
  emit(sim_reports_json(reports), a.c.out, out);
  if (!a.trace.empty()) {
    std::ostringstream csv;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      std::ostringstream part;
      write_trace_csv(part, reports[i], traces[i]);
      std::string s = part.str();
      // one header for the whole file
      if (i > 0) s = s.substr(s.find('\n', s.find('\n') + 1) + 1);
      csv << s;
    }
    emit(csv.str(), a.trace, out);
  }
  return converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  Common c;
  std::vector<std::string> suites;
  std::size_t cases = 0;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  CheckOptions o;
  o.seed = a.c.seed;
  o.cases = a.cases;
  o.threads = 0;
  const auto& names = a.suites.empty() ? check_names() : a.suites;
  std::ostringstream csv;
  CsvWriter w(csv, with_timing({"suite", "cases", "failures", "worst", "tolerance", "pass"}, a.c.timing));
  bool all = true;
  for (const auto& name : names) {
    const auto r = run_check(name, o);
    err << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.description << "\n";
    w << r.name << r.cases << r.failures << r.worst << r.tolerance << r.pass;
    if (a.c.timing) w << r.seconds;
    w.end_row();
    all = all && r.pass;
  }
  emit(csv.str(), a.c.out, out);
  return all ? kOk : kNotConverged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-distortion-cost and capacity toolkit for systems with actions and reconstruction constraints",
               "itact"};
  app.require_subcommand(1);

  RdcArgs rdc;
  auto* s_rdc = app.add_subcommand("rdc", "rate-distortion-cost of a source spec");
  add_common(s_rdc, rdc.c, true);
  s_rdc->add_option("--D", rdc.D, "distortion grid, start:step:count or a comma list")->required();
  s_rdc->add_option("--C", rdc.C, "cost grid (default: largest action cost)");
  auto* f_cr = s_rdc->add_flag("--cr", "require common reconstruction (default)");
  auto* f_nocr = s_rdc->add_flag("--no-cr", rdc.no_cr, "drop the common-reconstruction requirement");
  s_rdc->add_flag("--region", rdc.region, "report the two-rate region corner");
  s_rdc->add_option("--u-size", rdc.u_size, "auxiliary alphabet size for --no-cr (0 = default)");
  f_cr->excludes(f_nocr);

  CapArgs cap;
  auto* s_cap = app.add_subcommand("capacity", "capacity of a channel spec");
  add_common(s_cap, cap.c, true);
  s_cap->add_option("--mode", cap.mode, "ri|unconstrained|message|state|stegotext")
      ->check(CLI::IsMember({"ri", "unconstrained", "message", "state", "stegotext"}));
  s_cap->add_option("--u-size", cap.u_size, "auxiliary alphabet size for --mode message (0 = default)");

  ExampleArgs ex;
  auto* s_ex = app.add_subcommand("example", "data of the built-in binary and rewrite examples");
  add_common(s_ex, ex.c, false);
  s_ex->add_option("which", ex.which, "binary|rewrite")->required()->check(CLI::IsMember({"binary", "rewrite"}));
  s_ex->add_option("--p0", ex.p0, "decoder observation crossover (binary)")->check(CLI::Range(0.0, 0.5));
  s_ex->add_option("--D", ex.D, "distortion grid (binary)");
  s_ex->add_option("--C", ex.C, "cost grid (binary)");
  s_ex->add_option("--delta", ex.delta, "channel noise grid (rewrite)");

  SimArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo run of the random binning schemes");
  add_common(s_sim, sim.c, true);
  s_sim->add_option("which", sim.which, "source|channel")->required()->check(CLI::IsMember({"source", "channel"}));
  s_sim->add_option("--n", sim.n, "block lengths");
  s_sim->add_option("--D", sim.D, "target distortion (source)");
  s_sim->add_option("--C", sim.C, "target cost (source)");
  s_sim->add_option("--rate-frac", sim.rate_frac, "message rate as a fraction of capacity (channel)");
  s_sim->add_option("--rate", sim.rate, "absolute message rate, overrides --rate-frac (channel)");
  s_sim->add_option("--margin", sim.margin, "codebook rate margin (default 0.2 source, 0.05 channel)");
  s_sim->add_option("--eps", sim.eps, "typicality slack")->check(CLI::Range(0.0, 1.0));
  s_sim->add_option("--trials", sim.trials, "trials per block length")->check(CLI::PositiveNumber);
  s_sim->add_option("--support-floor", sim.floor, "drop distribution entries below this");
  s_sim->add_option("--permute", sim.permute, "relabel codewords with this seed (0 = off)");
  s_sim->add_option("--trace", sim.trace, "per-trial CSV file");

  CheckArgs chk;
  auto* s_chk = app.add_subcommand("check", "randomized property suites");
  add_common(s_chk, chk.c, false);
  chk.c.seed = 2024;
  s_chk->add_option("--suite", chk.suites, "suite names (default: all)");
  s_chk->add_option("--cases", chk.cases, "cases per suite (0 = suite default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (s_rdc->parsed()) return cmd_rdc(rdc, out);
    if (s_cap->parsed()) return cmd_capacity(cap, out);
    if (s_ex->parsed()) return cmd_example(ex, out);
    if (s_sim->parsed()) return cmd_simulate(sim, out);
    return cmd_check(chk, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const OptimizerFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

}  // namespace itact
