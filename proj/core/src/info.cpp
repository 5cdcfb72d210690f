#include "itact/info.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itact/error.hpp"

namespace itact {

namespace {

bool disjoint(const VarList& a, const VarList& b) {
  for (Var v : a) {
    if (std::find(b.begin(), b.end(), v) != b.end()) return false;
  }
  return true;
}

VarList concat(const VarList& a, const VarList& b) {
  VarList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

VarList concat(const VarList& a, const VarList& b, const VarList& c) {
  return concat(concat(a, b), c);
}

double marginal_entropy(const JointDist& joint, const VarList& vars) {
  if (vars.empty()) return 0.0;
  const auto m = joint.marginal(vars);
  double h = 0.0;
  for (double p : m.probs()) {
    if (p >= kTinyProb) h -= p * std::log2(p);
  }
  return h;
}

void require_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput(std::string(what) + ": argument outside [0,1]");
  }
}

// Factor rows must match the spec alphabets exactly.
void require_shape(const CondPmf& c, std::size_t rows, std::size_t width, const char* what) {
  if (c.rows() != rows || c.row_size() != width) {
    throw InvalidInput(std::string(what) + ": dimension mismatch against spec alphabets");
  }
}

}  // namespace

double entropy(const JointDist& joint, const VarList& over, const VarList& given) {
  if (!disjoint(over, given)) throw InvalidInput("entropy: `over` and `given` overlap");
  for (Var v : concat(over, given)) joint.position(v);
  if (over.empty()) return 0.0;
  return marginal_entropy(joint, concat(over, given)) - marginal_entropy(joint, given);
}

double mutual_information(const JointDist& joint, const VarList& a, const VarList& b,
                          const VarList& given) {
  if (!disjoint(a, b) || !disjoint(a, given) || !disjoint(b, given)) {
    throw InvalidInput("mutual_information: variable sets overlap");
  }
  for (Var v : concat(a, b, given)) joint.position(v);
  if (a.empty() || b.empty()) return 0.0;
  return marginal_entropy(joint, concat(a, given)) + marginal_entropy(joint, concat(b, given)) -
         marginal_entropy(joint, concat(a, b, given)) - marginal_entropy(joint, given);
}

double binary_entropy(double p) {
  require_prob(p, "binary_entropy");
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double star(double p, double d) {
  require_prob(p, "star");
  require_prob(d, "star");
  return p * (1.0 - d) + (1.0 - p) * d;
}

double verify_markov(const JointDist& joint, const VarList& left, const VarList& mid,
                     const VarList& right) {
  if (!disjoint(left, mid) || !disjoint(left, right) || !disjoint(mid, right)) {
    throw InvalidInput("verify_markov: variable sets overlap");
  }
  const VarList all = concat(left, mid, right);
  const auto lmr = joint.marginal(all);
  const auto lm_of = lmr.projection(concat(left, mid));
  const auto mr_of = lmr.projection(concat(mid, right));
  const auto m_of = lmr.projection(mid);
  const auto lm = lmr.marginal(concat(left, mid));
  const auto mr = lmr.marginal(concat(mid, right));
  std::vector<double> m(1, 1.0);
  if (!mid.empty()) {
    const auto mm = lmr.marginal(mid);
    m.assign(mm.probs().begin(), mm.probs().end());
  }
  double worst = 0.0;
  for (std::size_t cell = 0; cell < lmr.cells(); ++cell) {
    const double pm = m[m_of[cell]];
    const double predicted = pm > 0.0 ? lm.probs()[lm_of[cell]] * mr.probs()[mr_of[cell]] / pm : 0.0;
    worst = std::max(worst, std::abs(lmr.probs()[cell] - predicted));
  }
  return worst;
}

JointDist assemble_source_joint(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat) {
  spec.validate();
  require_shape(paX, spec.nx, spec.na, "assemble_source_joint P(a|x)");
  require_shape(pXhat, spec.nx * spec.nse * spec.na, spec.nxh, "assemble_source_joint P(xhat|x,se,a)");
  std::vector<double> probs;
  probs.reserve(spec.nx * spec.na * spec.nse * spec.nsd * spec.nxh);
  for (std::size_t x = 0; x < spec.nx; ++x) {
    for (std::size_t a = 0; a < spec.na; ++a) {
      const double pxa = spec.source[x] * paX.row(x)[a];
      for (std::size_t se = 0; se < spec.nse; ++se) {
        const auto xh_row = pXhat.row((x * spec.nse + se) * spec.na + a);
        for (std::size_t sd = 0; sd < spec.nsd; ++sd) {
          const double base = pxa * spec.p_si(x, a, se, sd);
          for (std::size_t xh = 0; xh < spec.nxh; ++xh) probs.push_back(base * xh_row[xh]);
        }
      }
    }
  }
  return JointDist({Var::X, Var::A, Var::Se, Var::Sd, Var::Xhat},
                   {spec.nx, spec.na, spec.nse, spec.nsd, spec.nxh}, std::move(probs),
                   "source joint");
}

JointDist assemble_channel_joint(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX) {
  spec.validate();
  if (pA.size() != spec.na) throw InvalidInput("assemble_channel_joint: P(a) size != |A|");
  require_shape(pX, spec.na * spec.nse, spec.nx, "assemble_channel_joint P(x|a,se)");
  std::vector<double> probs;
  probs.reserve(spec.na * spec.nse * spec.nsd * spec.nx * spec.ny);
  for (std::size_t a = 0; a < spec.na; ++a) {
    for (std::size_t se = 0; se < spec.nse; ++se) {
      const auto x_row = pX.row(a * spec.nse + se);
      for (std::size_t sd = 0; sd < spec.nsd; ++sd) {
        const double base = pA[a] * spec.p_state(a, se, sd);
        for (std::size_t x = 0; x < spec.nx; ++x) {
          for (std::size_t y = 0; y < spec.ny; ++y) {
            probs.push_back(base * x_row[x] * spec.p_y(x, se, sd, a, y));
          }
        }
      }
    }
  }
  return JointDist({Var::A, Var::Se, Var::Sd, Var::X, Var::Y},
                   {spec.na, spec.nse, spec.nsd, spec.nx, spec.ny}, std::move(probs),
                   "channel joint");
}

}  // namespace itact
