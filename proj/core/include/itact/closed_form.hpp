#pragma once

#include <cstdint>
#include <vector>

#include "itact/channel_cap.hpp"
#include "itact/distributions.hpp"
#include "itact/simplex_opt.hpp"

namespace itact {

/// h(p0 * D) - h(D), clamped at 0.
double r_cr_binary(double p0, double D);

struct WzEnvelopeResult {
  double rate = 0.0;
  double theta = 0.0;
  double beta = 0.0;
};

/// inf over theta, beta of theta (h(p0 * beta) - h(beta)) with
/// D = theta beta + (1 - theta) p0. Returns 0 for D >= p0.
WzEnvelopeResult r_wz_binary(double p0, double D);

/// Common-reconstruction rate of X ~ Bern(q) seen by the decoder through
/// BSC(p0), Hamming distortion. Convex line search over the test channel.
double r_cr_binary_general(double q, double p0, double D);

struct BinaryExampleParams {
  double p0 = 0.25;
  double C = 1.0;
  bool cr = true;
};

struct CurvePoint {
  double D = 0.0;
  double C = 0.0;
  double rate = 0.0;
  /// P(A=1|X=1) - C at the minimizer; 0 means the symmetric action policy.
  double asymmetry = 0.0;
};

/// Rate-distortion-cost curve of the binary example with P_A(1) = C, built
/// from the per-action rate functions.
std::vector<CurvePoint> binary_rd_curve(const BinaryExampleParams& params, const std::vector<double>& D_grid);

struct RewriteParams {
  double delta = 0.1;
  double pa = 0.5;
  double p = 0.5;  // P(x=0 | se=0, a=0)
  double q = 0.5;  // P(x=0 | se=0, a=1)
  double r = 0.5;  // P(x=0 | se=1, a=0)
  double s = 0.5;  // P(x=0 | se=1, a=1)
};

struct RewriteValue {
  double objective = 0.0;
  double slack = 0.0;
};

/// Closed-form H(Y) - H(Y|A,X) - I(X;Se|A) and H(Y|A) - H(Y|A,X) - I(X;Se|A)
/// for the rewrite channel.
RewriteValue rewrite_objective(const RewriteParams& params);

/// The input laws the five scalars describe.
Pmf rewrite_action_pmf(const RewriteParams& params);
CondPmf rewrite_input_cond(const RewriteParams& params);

/// Maximizes rewrite_objective over (pa, p, q, r, s) by per-axis grids with
/// cyclic coordinate refinement from a center start and 16 random restarts.
CapResult rewrite_capacity(double delta, bool constrained, std::uint64_t seed = 1);

}  // namespace itact
