#pragma once

#include <optional>
#include <vector>

#include "itact/distributions.hpp"
#include "itact/simplex_opt.hpp"
#include "itact/specs.hpp"

namespace itact {

struct RdcQuery {
  double D = 0.0;
  double C = 0.0;
};

struct RdcResult {
  double rate = 0.0;
  CondPmf arg_paX;                      // P(a|x)
  CondPmf arg_pXhat;                    // P(xhat|x,se,a); empty for rd_ac
  CondPmf arg_pU;                       // P(u|x,se,a); rd_ac only
  std::vector<std::size_t> decoder;     // g(u, sd) row-major; rd_ac only
  double achieved_distortion = 0.0;
  double achieved_cost = 0.0;
  bool converged = false;
  bool multimodal = false;
  std::size_t starts_used = 0;
  std::size_t iterations = 0;
};

struct RegionResult {
  double r1_min = 0.0;
  double sum_min = 0.0;
  bool converged = false;
};

/// Smallest distortion and cost any scheme can meet.
double min_distortion(const SourceSpec& spec);
double min_cost(const SourceSpec& spec);

/// min I(X;A) + I(Xhat;X,Se|A) - I(Xhat;Sd|A) under E d <= D, E cost <= C.
RdcResult rd_ac_cr(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts = {});

/// Same minimum through I(X;A) + I(Xhat;X,Se|A,Sd).
RdcResult rd_ac_cr_alt(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts = {});

/// Rate without the common-reconstruction requirement, over an auxiliary U of
/// size u_size (0 = |A||X|+3 capped at 16) and a deterministic decoder g(U,Sd).
/// The search always includes the embedding of the CR solution (U = Xhat),
/// taken from `cr_hint` when given and computed otherwise.
RdcResult rd_ac(const SourceSpec& spec, const RdcQuery& q, std::size_t u_size = 0,
                const OptOptions& opts = {}, const RdcResult* cr_hint = nullptr);

RegionResult rd_region(const SourceSpec& spec, const RdcQuery& q, const OptOptions& opts = {});

/// min I(Xhat;X|Sd) for a spec without actions and encoder side information.
RdcResult rd_steinberg(const SourceSpec& spec, double D, const OptOptions& opts = {});

/// Re-evaluates the CR objective on the result's distributions.
double evaluate_cr_rate(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat);

}  // namespace itact
