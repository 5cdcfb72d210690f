#pragma once

#include "itact/distributions.hpp"
#include "itact/specs.hpp"

namespace itact {

/// Cells with probability below this contribute nothing to any information
/// quantity.
inline constexpr double kTinyProb = 1e-15;

/// H(over | given) in bits. An empty `over` gives 0.
double entropy(const JointDist& joint, const VarList& over, const VarList& given = {});

/// I(a; b | given) in bits. May come out marginally negative from rounding.
double mutual_information(const JointDist& joint, const VarList& a, const VarList& b,
                          const VarList& given = {});

double binary_entropy(double p);

/// p(1-d) + (1-p)d.
double star(double p, double d);

/// max over cells of |P(l,m,r) - P(l,m) P(r|m)|. An empty `mid` tests plain
/// independence of left and right.
double verify_markov(const JointDist& joint, const VarList& left, const VarList& mid,
                     const VarList& right);

/// Joint over (X, A, Se, Sd, Xhat) from P(a|x) and P(xhat|x,se,a).
JointDist assemble_source_joint(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat);

/// Joint over (A, Se, Sd, X, Y) from P(a) and P(x|a,se).
JointDist assemble_channel_joint(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX);

}  // namespace itact
