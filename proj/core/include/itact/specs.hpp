#pragma once

#include <cstddef>
#include <vector>

#include "itact/distributions.hpp"
#include "itact/rng.hpp"

namespace itact {

/// Source system: source law, action-dependent side-information channel,
/// distortion and action cost.
struct SourceSpec {
  std::size_t nx = 0, na = 0, nse = 0, nsd = 0, nxh = 0;
  Pmf source;                        // P(x)
  CondPmf si_channel;                // [x][a] -> [se][sd]
  std::vector<double> distortion;    // [x][xhat]
  std::vector<double> cost;          // [a]

  double d(std::size_t x, std::size_t xh) const { return distortion[x * nxh + xh]; }
  double p_si(std::size_t x, std::size_t a, std::size_t se, std::size_t sd) const {
    return si_channel.table()[((x * na + a) * nse + se) * nsd + sd];
  }

  /// Throws InvalidInput unless all tensors agree with the alphabet sizes and
  /// distortion and cost are finite and nonnegative.
  void validate() const;
};

/// Channel system: action-driven state channel and state-dependent main
/// channel, optionally depending on the action as well.
struct ChannelSpec {
  std::size_t na = 0, nse = 0, nsd = 0, nx = 0, ny = 0;
  CondPmf state_channel;             // [a] -> [se][sd]
  CondPmf main_channel;              // [x][se][sd] -> [y]  or  [x][se][sd][a] -> [y]
  bool action_dependent = false;

  double p_state(std::size_t a, std::size_t se, std::size_t sd) const {
    return state_channel.table()[(a * nse + se) * nsd + sd];
  }
  double p_y(std::size_t x, std::size_t se, std::size_t sd, std::size_t a, std::size_t y) const {
    std::size_t row = (x * nse + se) * nsd + sd;
    if (action_dependent) row = row * na + a;
    return main_channel.table()[row * ny + y];
  }

  void validate() const;
};

SourceSpec make_source_spec(Pmf source, std::size_t na, std::size_t nse, std::size_t nsd,
                            std::size_t nxh, std::vector<double> si_table,
                            std::vector<double> distortion, std::vector<double> cost);

ChannelSpec make_channel_spec(std::size_t na, std::size_t nse, std::size_t nsd, std::size_t nx,
                              std::size_t ny, std::vector<double> state_table,
                              std::vector<double> main_table, bool action_dependent);

/// Binary source with switchable side information: X ~ Bern(1/2); A=1 shows
/// the decoder X through BSC(p0), A=0 shows it an independent fair bit;
/// Hamming distortion, cost Λ(a) = a, no encoder side information.
SourceSpec binary_action_source(double p0);

/// Same source with the action fixed (|A| = 1) and a BSC(p0) decoder observation.
SourceSpec binary_wz_source(double p0);

/// Memory cell with rewrite option: Se = BSC(δ)(A); writing X=0 leaves Y=Se,
/// X=1 rewrites and gives Y = BSC(δ)(A). No decoder state.
ChannelSpec rewrite_channel(double delta);

/// Random specs with every table drawn from a flat Dirichlet.
SourceSpec random_source_spec(CounterRng& rng, std::size_t nx, std::size_t na, std::size_t nse,
                              std::size_t nsd, std::size_t nxh);
ChannelSpec random_channel_spec(CounterRng& rng, std::size_t na, std::size_t nse, std::size_t nsd,
                                std::size_t nx, std::size_t ny, bool action_dependent = false);

/// Random channel whose state channel factors as P(se|a)P(sd|a) and whose main
/// channel ignores Se.
ChannelSpec random_state_separable_channel(CounterRng& rng, std::size_t na, std::size_t nse,
                                           std::size_t nsd, std::size_t nx, std::size_t ny);

/// Flat-Dirichlet random conditional with the given row count and width.
std::vector<double> random_rows(CounterRng& rng, std::size_t rows, std::size_t width);

}  // namespace itact
