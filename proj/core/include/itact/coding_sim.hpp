#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "itact/distributions.hpp"
#include "itact/source_rdc.hpp"
#include "itact/specs.hpp"

namespace itact {

/// Codebooks larger than this many symbols in total are refused.
inline constexpr std::size_t kMaxCodebookSymbols = std::size_t{1} << 24;

struct TypicalityParams {
  double epsilon = 0.25;
  std::size_t n = 1;
};

/// Every symbol's empirical frequency is within epsilon * P(a) of P(a).
bool is_typical(std::span<const std::size_t> seq, std::span<const double> pmf, double epsilon);
bool is_typical(std::span<const std::size_t> seq, const Pmf& pmf, double epsilon);

struct SimParams {
  std::size_t n = 16;
  double rate_margin = 0.2;
  double epsilon = 0.25;
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  /// Nonzero: codeword indices are relabelled by a permutation drawn from this seed.
  std::uint64_t permute_codebook = 0;
  /// Entries of the supplied distributions below this are zeroed (rows
  /// renormalized) before codebooks are drawn.
  double support_floor = 0.01;
  /// 1 = serial, 0 = ITACT_THREADS / hardware default.
  std::size_t threads = 1;
};

struct SimReport {
  std::string scheme;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double rate_margin = 0.0;
  /// Source: action, codebook and bin rates. Channel: total, action-part,
  /// bin-part and in-bin padding rates. All are log2(size) / n of the sizes used.
  std::vector<double> rates;
  std::size_t outer_words = 0;
  std::size_t inner_words = 0;
  std::size_t bins = 0;
  double empirical_distortion = 0.0;
  double p_cr = 0.0;
  double p_me = 0.0;
  double p_xe = 0.0;
  double encoder_failure_rate = 0.0;
};

struct TrialTrace {
  std::size_t trial = 0;
  bool encoder_failed = false;
  bool cr_mismatch = false;
  bool message_error = false;
  bool input_error = false;
  double distortion = 0.0;
};

/// Zeroes entries below `floor` and renormalizes each row. A row whose
/// entries all fall below the floor is left unchanged.
CondPmf prune_support(const CondPmf& p, double floor);
Pmf prune_support(const Pmf& p, double floor);

/// Random binning scheme for lossy source coding with actions and common
/// reconstruction, driven by the supplied P(a|x) and P(xhat|x,se,a).
SimReport simulate_source_scheme(const SourceSpec& spec, const CondPmf& paX, const CondPmf& pXhat,
                                 const SimParams& params, std::vector<TrialTrace>* trace = nullptr);

/// Two-stage channel coding scheme with input reconstruction at total rate
/// `rate`, driven by the supplied P(a) and P(x|a,se).
SimReport simulate_channel_scheme(const ChannelSpec& spec, const Pmf& pA, const CondPmf& pX, double rate,
                                  const SimParams& params, std::vector<TrialTrace>* trace = nullptr);

}  // namespace itact
