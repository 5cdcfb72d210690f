#include "itact/specs.hpp"

#include <cmath>
#include <string>

#include "itact/error.hpp"

namespace itact {

namespace {

void check_measure(const std::vector<double>& v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw InvalidInput(std::string(what) + ": expected " + std::to_string(expected) +
                       " entries, got " + std::to_string(v.size()));
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidInput(std::string(what) + ": entries must be finite and nonnegative");
    }
  }
}

void check_cond(const CondPmf& c, std::size_t rows, std::size_t width, const char* what) {
  if (c.rows() != rows || c.row_size() != width) {
    throw InvalidInput(std::string(what) + ": table shape does not match the alphabets");
  }
}

std::vector<double> bsc(double delta) { return {1.0 - delta, delta, delta, 1.0 - delta}; }

}  // namespace

void SourceSpec::validate() const {
  if (nx == 0 || na == 0 || nse == 0 || nsd == 0 || nxh == 0) {
    throw InvalidInput("source spec: alphabet sizes must be >= 1");
  }
  if (source.size() != nx) throw InvalidInput("source spec: source pmf size != |X|");
  check_cond(si_channel, nx * na, nse * nsd, "source spec si_channel");
  check_measure(distortion, nx * nxh, "source spec distortion");
  check_measure(cost, na, "source spec cost");
}

void ChannelSpec::validate() const {
  if (na == 0 || nse == 0 || nsd == 0 || nx == 0 || ny == 0) {
    throw InvalidInput("channel spec: alphabet sizes must be >= 1");
  }
  check_cond(state_channel, na, nse * nsd, "channel spec state_channel");
  check_cond(main_channel, nx * nse * nsd * (action_dependent ? na : 1), ny,
             "channel spec main_channel");
}

SourceSpec make_source_spec(Pmf source, std::size_t na, std::size_t nse, std::size_t nsd,
                            std::size_t nxh, std::vector<double> si_table,
                            std::vector<double> distortion, std::vector<double> cost) {
  SourceSpec s;
  s.nx = source.size();
  s.na = na;
  s.nse = nse;
  s.nsd = nsd;
  s.nxh = nxh;
  s.source = std::move(source);
  s.si_channel = CondPmf({Var::X, Var::A}, {s.nx, na}, {Var::Se, Var::Sd}, {nse, nsd},
                         std::move(si_table), "si_channel");
  s.distortion = std::move(distortion);
  s.cost = std::move(cost);
  s.validate();
  return s;
}

ChannelSpec make_channel_spec(std::size_t na, std::size_t nse, std::size_t nsd, std::size_t nx,
                              std::size_t ny, std::vector<double> state_table,
                              std::vector<double> main_table, bool action_dependent) {
  ChannelSpec c;
  c.na = na;
  c.nse = nse;
  c.nsd = nsd;
  c.nx = nx;
  c.ny = ny;
  c.action_dependent = action_dependent;
  c.state_channel = CondPmf({Var::A}, {na}, {Var::Se, Var::Sd}, {nse, nsd},
                            std::move(state_table), "state_channel");
  if (action_dependent) {
    c.main_channel = CondPmf({Var::X, Var::Se, Var::Sd, Var::A}, {nx, nse, nsd, na}, {Var::Y},
                             {ny}, std::move(main_table), "main_channel");
  } else {
    c.main_channel = CondPmf({Var::X, Var::Se, Var::Sd}, {nx, nse, nsd}, {Var::Y}, {ny},
                             std::move(main_table), "main_channel");
  }
  c.validate();
  return c;
}

SourceSpec binary_action_source(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidInput("crossover probability outside [0,1]");
  // [x][a][se][sd] with |Se| = 1
  std::vector<double> si;
  for (std::size_t x = 0; x < 2; ++x) {
    si.insert(si.end(), {0.5, 0.5});
    const double flip = x == 0 ? p0 : 1.0 - p0;
    si.insert(si.end(), {1.0 - flip, flip});
  }
  return make_source_spec(Pmf({0.5, 0.5}), 2, 1, 2, 2, std::move(si), {0, 1, 1, 0}, {0, 1});
}

SourceSpec binary_wz_source(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidInput("crossover probability outside [0,1]");
  return make_source_spec(Pmf({0.5, 0.5}), 1, 1, 2, 2, bsc(p0), {0, 1, 1, 0}, {0});
}

ChannelSpec rewrite_channel(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("delta outside [0,1]");
  const auto state = bsc(delta);
  // [x][se][sd][a] -> [y]
  std::vector<double> main;
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t se = 0; se < 2; ++se) {
      for (std::size_t a = 0; a < 2; ++a) {
        if (x == 0) {
          main.push_back(se == 0 ? 1.0 : 0.0);
          main.push_back(se == 1 ? 1.0 : 0.0);
        } else {
          main.push_back(state[a * 2]);
          main.push_back(state[a * 2 + 1]);
        }
      }
    }
  }
  return make_channel_spec(2, 2, 1, 2, 2, state, std::move(main), true);
}

std::vector<double> random_rows(CounterRng& rng, std::size_t rows, std::size_t width) {
  std::vector<double> out;
  out.reserve(rows * width);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = rng.dirichlet(width);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

SourceSpec random_source_spec(CounterRng& rng, std::size_t nx, std::size_t na, std::size_t nse,
                              std::size_t nsd, std::size_t nxh) {
  Pmf source(rng.dirichlet(nx));
  auto si = random_rows(rng, nx * na, nse * nsd);
  std::vector<double> dist(nx * nxh);
  for (double& d : dist) d = rng.uniform();
  std::vector<double> cost(na);
  for (double& c : cost) c = rng.uniform();
  return make_source_spec(std::move(source), na, nse, nsd, nxh, std::move(si), std::move(dist),
                          std::move(cost));
}

ChannelSpec random_channel_spec(CounterRng& rng, std::size_t na, std::size_t nse, std::size_t nsd,
                                std::size_t nx, std::size_t ny, bool action_dependent) {
  auto state = random_rows(rng, na, nse * nsd);
  auto main = random_rows(rng, nx * nse * nsd * (action_dependent ? na : 1), ny);
  return make_channel_spec(na, nse, nsd, nx, ny, std::move(state), std::move(main),
                           action_dependent);
}

ChannelSpec random_state_separable_channel(CounterRng& rng, std::size_t na, std::size_t nse,
                                           std::size_t nsd, std::size_t nx, std::size_t ny) {
  const auto pse = random_rows(rng, na, nse);
  const auto psd = random_rows(rng, na, nsd);
  std::vector<double> state;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t se = 0; se < nse; ++se) {
      for (std::size_t sd = 0; sd < nsd; ++sd) state.push_back(pse[a * nse + se] * psd[a * nsd + sd]);
    }
  }
  const auto w = random_rows(rng, nx * nsd, ny);
  std::vector<double> main;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t se = 0; se < nse; ++se) {
      for (std::size_t sd = 0; sd < nsd; ++sd) {
        const double* row = &w[(x * nsd + sd) * ny];
        main.insert(main.end(), row, row + ny);
      }
    }
  }
  return make_channel_spec(na, nse, nsd, nx, ny, std::move(state), std::move(main), false);
}

}  // namespace itact
