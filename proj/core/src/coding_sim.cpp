#include "itact/coding_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/parallel.hpp"
#include "itact/rng.hpp"

namespace itact {

bool is_typical(std::span<const std::size_t> seq, std::span<const double> pmf, double epsilon) {
  if (seq.empty()) throw InvalidInput("is_typical: empty sequence");
  std::vector<std::size_t> counts(pmf.size(), 0);
  for (std::size_t s : seq) {
    if (s >= pmf.size()) throw InvalidInput("is_typical: symbol outside the alphabet");
    ++counts[s];
  }
  const double n = static_cast<double>(seq.size());
  for (std::size_t a = 0; a < pmf.size(); ++a) {
    if (std::abs(static_cast<double>(counts[a]) / n - pmf[a]) > epsilon * pmf[a]) return false;
  }
  return true;
}

bool is_typical(std::span<const std::size_t> seq, const Pmf& pmf, double epsilon) {
  return is_typical(seq, pmf.probs(), epsilon);
}

namespace {

std::vector<double> prune_rows(std::span<const double> table, std::size_t width, double floor) {
  std::vector<double> out(table.begin(), table.end());
  for (std::size_t r = 0; r * width < out.size(); ++r) {
    auto row = std::span<double>(out).subspan(r * width, width);
    double kept = 0.0;
    for (double v : row) kept += v >= floor ? v : 0.0;
    if (kept <= 0.0) continue;
    for (double& v : row) v = v >= floor ? v / kept : 0.0;
  }
  return out;
}

}  // namespace

CondPmf prune_support(const CondPmf& p, double floor) {
  return CondPmf(p.cond_vars(), p.cond_sizes(), p.out_vars(), p.out_sizes(),
                 prune_rows(p.table(), p.row_size(), floor), "pruned conditional");
}

Pmf prune_support(const Pmf& p, double floor) {
  return Pmf(prune_rows(p.probs(), p.size(), floor), "pruned pmf");
}

namespace {

using Word = std::vector<std::size_t>;

std::size_t codebook_size(std::size_t n, double rate) {
  const double bits = static_cast<double>(n) * rate;
  if (bits > 62.0) throw ResourceLimit("codebook size overflows");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::exp2(bits) - 1e-9)));
}

void guard_symbols(std::size_t n, std::size_t words) {
  if (words > kMaxCodebookSymbols / std::max<std::size_t>(n, 1))
    throw ResourceLimit("codebook needs " + std::to_string(words) + " words of length " + std::to_string(n) +
                        ", above the symbol limit");
}

// Counts product symbols of several aligned sequences against a joint pmf
// laid out row-major in the order the sequences are given.
class JointTest {
 public:
  JointTest(const JointDist& joint, const VarList& vars, double epsilon)
      : epsilon_(epsilon), marginal_(joint.marginal(vars)) {
    sizes_ = marginal_.sizes();
    // marginal() keeps the joint's variable order; map it back to the caller's
    strides_.assign(vars.size(), 0);
    std::size_t stride = 1;
    for (std::size_t k = marginal_.vars().size(); k-- > 0;) {
      const auto pos = std::find(vars.begin(), vars.end(), marginal_.vars()[k]) - vars.begin();
      strides_[static_cast<std::size_t>(pos)] = stride;
      stride *= sizes_[k];
    }
  }

  bool operator()(std::initializer_list<const Word*> seqs) const {
    const std::size_t n = (*seqs.begin())->size();
    thread_local std::vector<std::size_t> product;
    product.assign(n, 0);
    std::size_t k = 0;
    for (const Word* w : seqs) {
      for (std::size_t i = 0; i < n; ++i) product[i] += (*w)[i] * strides_[k];
      ++k;
    }
    return is_typical(product, marginal_.probs(), epsilon_);
  }

 private:
  double epsilon_;
  JointDist marginal_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
};

// P(out | cond) rows from a joint, with cond and out single variables.
std::vector<std::vector<double>> conditional_rows(const JointDist& joint, Var cond, Var out) {
  const JointDist m = joint.marginal({cond, out});
  const std::size_t nc = joint.size_of(cond);
  const std::size_t no = joint.size_of(out);
  const bool cond_first = m.vars()[0] == cond;
  std::vector<std::vector<double>> rows(nc, std::vector<double>(no, 0.0));
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t o = 0; o < no; ++o) rows[c][o] = m.probs()[cond_first ? c * no + o : o * nc + c];
    const double t = std::accumulate(rows[c].begin(), rows[c].end(), 0.0);
    for (double& v : rows[c]) v = t > 0 ? v / t : 1.0 / static_cast<double>(no);
  }
  return rows;
}

std::vector<double> marginal_probs(const JointDist& joint, Var v) {
  const JointDist m = joint.marginal({v});
  return {m.probs().begin(), m.probs().end()};
}

Word draw_iid(CounterRng& rng, std::span<const double> p, std::size_t n) {
  Word w(n);
  for (auto& s : w) s = rng.categorical(p);
  return w;
}

Word draw_conditional(CounterRng& rng, const std::vector<std::vector<double>>& rows, const Word& given) {
  Word w(given.size());
  for (std::size_t i = 0; i < given.size(); ++i) w[i] = rng.categorical(rows[given[i]]);
  return w;
}

void maybe_permute(std::vector<Word>& words, std::uint64_t seed, std::uint64_t stream) {
  if (seed == 0) return;
  CounterRng rng(seed, stream);
  for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
}

void check_params(const SimParams& p) {
  if (p.n == 0) throw InvalidInput("simulation: n must be at least 1");
  if (p.trials == 0) throw InvalidInput("simulation: trials must be at least 1");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw InvalidInput("simulation: epsilon must lie in (0,1)");
  if (!std::isfinite(p.rate_margin)) throw InvalidInput("simulation: rate_margin must be finite");
  if (!(p.support_floor >= 0.0 && p.support_floor < 1.0))
    throw InvalidInput("simulation: support_floor must lie in [0,1)");
}

double rate_of(std::size_t size, std::size_t n) {
  return std::log2(static_cast<double>(size)) / static_cast<double>(n);
}

template <class Trial>
void run_trials(const SimParams& p, std::vector<TrialTrace>& out, Trial&& trial) {
  out.assign(p.trials, TrialTrace{});
  parallel_for(p.trials, p.threads, [&](std::size_t t) {
    out[t] = trial(t);
    out[t].trial = t;
  });
}

}  // namespace

SimReport simulate_source_scheme(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat,
                                 const SimParams& params, std::vector<TrialTrace>* trace) {
  check_params(params);
  spec.validate();
  const std::size_t n = params.n;
  const double delta = params.rate_margin;
  const JointDist joint = assemble_source_joint(spec, prune_support(paX, params.support_floor),
                                                prune_support(pXhat, params.support_floor));

  const double r_action = std::max(0.0, mutual_information(joint, {Var::X}, {Var::A}));
  const double r_code = std::max(0.0, mutual_information(joint, {Var::Xhat}, {Var::X, Var::Se}, {Var::A}));
  const double r_bin = r_code - mutual_information(joint, {Var::Xhat}, {Var::Sd}, {Var::A});

  const std::size_t n_actions = codebook_size(n, r_action + delta);
  std::size_t per_action = codebook_size(n, r_code + delta);
  const std::size_t bins = std::min(per_action, codebook_size(n, r_bin + 2.0 * delta));
  per_action = (per_action + bins - 1) / bins * bins;
  const std::size_t bin_size = per_action / bins;
  guard_symbols(n, n_actions + n_actions * per_action);

  const auto pA = marginal_probs(joint, Var::A);
  const auto pX = marginal_probs(joint, Var::X);
  const auto xhat_given_a = conditional_rows(joint, Var::A, Var::Xhat);

  std::vector<Word> actions(n_actions);
  std::vector<std::vector<Word>> xhats(n_actions);
  {
    CounterRng rng(params.seed, 0);
    for (auto& a : actions) a = draw_iid(rng, pA, n);
    for (std::size_t w = 0; w < n_actions; ++w) {
      xhats[w].resize(per_action);
      for (auto& xh : xhats[w]) xh = draw_conditional(rng, xhat_given_a, actions[w]);
    }
  }
  maybe_permute(actions, params.permute_codebook, 0);
  for (std::size_t w = 0; w < n_actions; ++w) maybe_permute(xhats[w], params.permute_codebook, w + 1);

  const JointTest typ_xa(joint, {Var::X, Var::A}, params.epsilon);
  const JointTest typ_enc(joint, {Var::X, Var::Se, Var::A, Var::Xhat}, params.epsilon);
  const JointTest typ_dec(joint, {Var::Xhat, Var::Sd, Var::A}, params.epsilon);

  // SI channel rows flattened over (se, sd) for each (x, a)
  std::vector<std::vector<double>> si_rows(spec.nx * spec.na, std::vector<double>(spec.nse * spec.nsd));
  for (std::size_t x = 0; x < spec.nx; ++x)
    for (std::size_t a = 0; a < spec.na; ++a)
      for (std::size_t se = 0; se < spec.nse; ++se)
        for (std::size_t sd = 0; sd < spec.nsd; ++sd)
          si_rows[x * spec.na + a][se * spec.nsd + sd] = spec.p_si(x, a, se, sd);

  std::vector<TrialTrace> rows;
  run_trials(params, rows, [&](std::size_t t) {
    CounterRng rng(params.seed, t + 1);
    TrialTrace tr;
    const Word x = draw_iid(rng, pX, n);

    std::size_t w1 = n_actions;
    for (std::size_t w = 0; w < n_actions; ++w) {
      if (typ_xa({&x, &actions[w]})) {
        w1 = w;
        break;
      }
    }
    if (w1 == n_actions) tr.encoder_failed = true;

    std::size_t j = per_action;
    Word se(n), sd(n);
    const Word& a = actions[w1 == n_actions ? 0 : w1];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = rng.categorical(si_rows[x[i] * spec.na + a[i]]);
      se[i] = c / spec.nsd;
      sd[i] = c % spec.nsd;
    }
    if (!tr.encoder_failed) {
      for (std::size_t k = 0; k < per_action; ++k) {
        if (typ_enc({&x, &se, &a, &xhats[w1][k]})) {
          j = k;
          break;
        }
      }
    }
    if (j == per_action) {
      tr.encoder_failed = true;
      w1 = 0;
      j = 0;
    }
    const std::size_t bin = j / bin_size;
    const Word& a_dec = actions[w1];

    // decoder: unique typical word in the bin, else the bin's first word
    std::size_t found = 0;
    std::size_t decoded = bin * bin_size;
    for (std::size_t v = 0; v < bin_size; ++v) {
      const std::size_t k = bin * bin_size + v;
      if (typ_dec({&xhats[w1][k], &sd, &a_dec})) {
        if (++found == 1) decoded = k;
      }
    }
    if (found != 1) decoded = bin * bin_size;

    const Word& xh = xhats[w1][decoded];
    tr.cr_mismatch = xh != xhats[w1][j];
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += spec.d(x[i], xh[i]);
    tr.distortion = dist / static_cast<double>(n);
    return tr;
  });

  SimReport rep;
  rep.scheme = "source";
  rep.n = n;
  rep.trials = params.trials;
  rep.seed = params.seed;
  rep.epsilon = params.epsilon;
  rep.rate_margin = delta;
  rep.rates = {rate_of(n_actions, n), rate_of(per_action, n), rate_of(bins, n)};
  rep.outer_words = n_actions;
  rep.inner_words = per_action;
  rep.bins = bins;
  for (const auto& r : rows) {
    rep.empirical_distortion += r.distortion;
    rep.p_cr += r.cr_mismatch ? 1.0 : 0.0;
    rep.encoder_failure_rate += r.encoder_failed ? 1.0 : 0.0;
  }
  const double T = static_cast<double>(params.trials);
  rep.empirical_distortion /= T;
  rep.p_cr /= T;
  rep.encoder_failure_rate /= T;
  if (trace) *trace = std::move(rows);
  return rep;
}

SimReport simulate_channel_scheme(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX, double rate,
                                  const SimParams& params, std::vector<TrialTrace>* trace) {
  check_params(params);
  spec.validate();
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("simulate_channel_scheme: rate must be >= 0");
  const std::size_t n = params.n;
  const double delta = params.rate_margin;
  const Pmf pA_used = prune_support(pA, params.support_floor);
  const JointDist joint = assemble_channel_joint(spec, pA_used, prune_support(pX, params.support_floor));

  const double i_action = mutual_information(joint, {Var::A}, {Var::Y, Var::Sd});
  const double i_leak = std::max(0.0, mutual_information(joint, {Var::X}, {Var::Se}, {Var::A}));
  const double r1 = std::min(rate, std::max(0.0, i_action - delta));
  const double r2 = rate - r1;

  const std::size_t n_actions = codebook_size(n, r1);
  const std::size_t bins = codebook_size(n, r2);
  const std::size_t pad = codebook_size(n, std::max(0.0, i_leak + delta));
  const std::size_t per_action = bins * pad;
  guard_symbols(n, n_actions + n_actions * per_action);

  const auto x_given_a = conditional_rows(joint, Var::A, Var::X);
  std::vector<std::vector<double>> state_rows(spec.na, std::vector<double>(spec.nse * spec.nsd));
  for (std::size_t a = 0; a < spec.na; ++a)
    for (std::size_t se = 0; se < spec.nse; ++se)
      for (std::size_t sd = 0; sd < spec.nsd; ++sd) state_rows[a][se * spec.nsd + sd] = spec.p_state(a, se, sd);

  std::vector<Word> actions(n_actions);
  std::vector<std::vector<Word>> xs(n_actions);
  {
    CounterRng rng(params.seed, 0);
    for (auto& a : actions) a = draw_iid(rng, pA_used.probs(), n);
    for (std::size_t m = 0; m < n_actions; ++m) {
      xs[m].resize(per_action);
      for (auto& x : xs[m]) x = draw_conditional(rng, x_given_a, actions[m]);
    }
  }
  maybe_permute(actions, params.permute_codebook, 0);
  for (std::size_t m = 0; m < n_actions; ++m) maybe_permute(xs[m], params.permute_codebook, m + 1);

  const JointTest typ_enc(joint, {Var::A, Var::Se, Var::X}, params.epsilon);
  const JointTest typ_a(joint, {Var::A, Var::Y, Var::Sd}, params.epsilon);
  const JointTest typ_x(joint, {Var::A, Var::X, Var::Y, Var::Sd}, params.epsilon);

  std::vector<TrialTrace> rows;
  run_trials(params, rows, [&](std::size_t t) {
    CounterRng rng(params.seed, t + 1);
    TrialTrace tr;
    const std::size_t m1 = rng.below(n_actions);
    const std::size_t m2 = rng.below(bins);
    const Word& a = actions[m1];
    Word se(n), sd(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = rng.categorical(state_rows[a[i]]);
      se[i] = c / spec.nsd;
      sd[i] = c % spec.nsd;
    }
    std::size_t j = pad;
    for (std::size_t k = 0; k < pad; ++k) {
      if (typ_enc({&a, &se, &xs[m1][m2 * pad + k]})) {
        j = k;
        break;
      }
    }
    if (j == pad) {
      tr.encoder_failed = true;
      j = 0;
    }
    const Word& x = xs[m1][m2 * pad + j];
    std::vector<double> py(spec.ny);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t v = 0; v < spec.ny; ++v) py[v] = spec.p_y(x[i], se[i], sd[i], a[i], v);
      y[i] = rng.categorical(py);
    }

    std::size_t found = 0;
    std::size_t m1_hat = 0;
    for (std::size_t m = 0; m < n_actions; ++m) {
      if (typ_a({&actions[m], &y, &sd})) {
        if (++found == 1) m1_hat = m;
      }
    }
    if (found != 1) m1_hat = 0;

    const Word& a_hat = actions[m1_hat];
    found = 0;
    std::size_t k_hat = 0;
    for (std::size_t k = 0; k < per_action; ++k) {
      if (typ_x({&a_hat, &xs[m1_hat][k], &y, &sd})) {
        if (++found == 1) k_hat = k;
      }
    }
    if (found != 1) k_hat = 0;

    tr.message_error = m1_hat != m1 || k_hat / pad != m2;
    tr.input_error = xs[m1_hat][k_hat] != x;
    return tr;
  });

  SimReport rep;
  rep.scheme = "channel";
  rep.n = n;
  rep.trials = params.trials;
  rep.seed = params.seed;
  rep.epsilon = params.epsilon;
  rep.rate_margin = delta;
  rep.rates = {rate_of(n_actions * bins, n), rate_of(n_actions, n), rate_of(bins, n), rate_of(pad, n)};
  rep.outer_words = n_actions;
  rep.inner_words = per_action;
  rep.bins = bins;
  for (const auto& r : rows) {
    rep.p_me += r.message_error ? 1.0 : 0.0;
    rep.p_xe += r.input_error ? 1.0 : 0.0;
    rep.encoder_failure_rate += r.encoder_failed ? 1.0 : 0.0;
  }
  const double T = static_cast<double>(params.trials);
  rep.p_me /= T;
  rep.p_xe /= T;
  rep.encoder_failure_rate /= T;
  if (trace) *trace = std::move(rows);
  return rep;
}

}  // namespace itact
