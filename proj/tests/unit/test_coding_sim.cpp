#include <gtest/gtest.h>

#include <cmath>

#include "itact/channel_cap.hpp"
#include "itact/closed_form.hpp"
#include "itact/coding_sim.hpp"
#include "itact/error.hpp"
#include "itact/source_rdc.hpp"

using namespace itact;

TEST(Typicality, Examples) {
  const Pmf u({0.5, 0.5});
  const std::size_t balanced[] = {0, 1, 0, 1};
  const std::size_t zeros[] = {0, 0, 0, 0};
  EXPECT_TRUE(is_typical(balanced, u, 0.1));
  EXPECT_FALSE(is_typical(zeros, u, 0.1));
  const Pmf skew({1.0, 0.0});
  const std::size_t with_one[] = {0, 0, 1};
  EXPECT_FALSE(is_typical(with_one, skew, 0.9));
  EXPECT_THROW(is_typical(std::span<const std::size_t>{}, u, 0.1), InvalidInput);
}

TEST(Typicality, RelativeSlack) {
  const Pmf p({0.25, 0.75});
  const std::size_t s[] = {0, 1, 1, 1, 1, 1, 1, 1};  // frequency 1/8 vs 1/4
  EXPECT_FALSE(is_typical(s, p, 0.4));
  EXPECT_TRUE(is_typical(s, p, 0.5));
}

TEST(PruneSupport, DropsSmallEntries) {
  const CondPmf c({Var::A}, {2}, {Var::X}, {2}, {0.995, 0.005, 0.4, 0.6});
  const auto p = prune_support(c, 0.01);
  EXPECT_EQ(p.row(0)[0], 1.0);
  EXPECT_EQ(p.row(0)[1], 0.0);
  EXPECT_NEAR(p.row(1)[1], 0.6, 1e-15);
}

namespace {

// X is a fixed bit the decoder also sees; any n is typical.
SourceSpec known_source() {
  return make_source_spec(Pmf({1.0, 0.0}), 1, 1, 2, 2, {1.0, 0.0, 0.0, 1.0}, {0, 1, 1, 0}, {0.0});
}

}  // namespace

TEST(SourceScheme, TrivialSpecIsExact) {
  const auto spec = known_source();
  const auto sol = rd_ac_cr(spec, {0.0, 0.0});
  SimParams p;
  p.n = 1;
  p.rate_margin = 1.0;
  p.trials = 200;
  const auto r = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  EXPECT_EQ(r.p_cr, 0.0);
  EXPECT_EQ(r.empirical_distortion, 0.0);
  EXPECT_EQ(r.encoder_failure_rate, 0.0);
}

TEST(SourceScheme, UndersizedCodebooksMissTheTarget) {
  const auto spec = binary_action_source(0.25);
  const auto sol = rd_ac_cr(spec, {0.1, 1.0});
  SimParams p;
  p.n = 16;
  p.epsilon = 0.7;
  p.rate_margin = -0.15;
  const auto r = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  EXPECT_GT(r.empirical_distortion, 0.15);
}

TEST(SourceScheme, DeterministicAndSeedSensitive) {
  const auto spec = binary_action_source(0.25);
  const auto sol = rd_ac_cr(spec, {0.1, 1.0});
  SimParams p;
  p.n = 12;
  p.epsilon = 0.7;
  p.trials = 500;
  const auto a = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  p.threads = 4;
  const auto b = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  EXPECT_EQ(a.empirical_distortion, b.empirical_distortion);
  EXPECT_EQ(a.p_cr, b.p_cr);
  p.permute_codebook = 99;
  std::vector<TrialTrace> t1, t2;
  simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p, &t2);
  p.permute_codebook = 0;
  simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p, &t1);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < t1.size(); ++i) differ += t1[i].distortion != t2[i].distortion;
  EXPECT_GT(differ, 0u);
}

TEST(SourceScheme, IndependentSeedsAgreeStatistically) {
  const auto spec = binary_action_source(0.25);
  const auto sol = rd_ac_cr(spec, {0.1, 1.0});
  SimParams p;
  p.n = 12;
  p.epsilon = 0.7;
  p.trials = 2000;
  const auto a = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  p.seed = 2;
  const auto b = simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p);
  const auto fa = a.encoder_failure_rate, fb = b.encoder_failure_rate;
  const double se = std::sqrt((fa * (1 - fa) + fb * (1 - fb)) / 2000.0);
  EXPECT_LE(std::abs(fa - fb), 2.576 * se + 1e-12);
}

TEST(SourceScheme, MemoryGuard) {
  const auto spec = binary_action_source(0.25);
  const auto sol = rd_ac_cr(spec, {0.1, 1.0});
  SimParams p;
  p.n = 40;
  p.rate_margin = 0.3;
  EXPECT_THROW(simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p), ResourceLimit);
}

TEST(ChannelScheme, NoiselessChannelDecodes) {
  const auto spec = rewrite_channel(0.0);
  const Pmf pA({0.5, 0.5});
  const CondPmf always_rewrite({Var::A, Var::Se}, {2, 2}, {Var::X}, {2}, {0, 1, 0, 1, 0, 1, 0, 1});
  SimParams p;
  p.n = 8;
  p.epsilon = 0.7;
  p.trials = 500;
  const auto r = simulate_channel_scheme(spec, pA, always_rewrite, 0.8, p);
  EXPECT_EQ(r.p_xe, 0.0);
  // errors come only from atypical action words (about 7% at n = 8) and from
  // another of the 85 words repeating the sent one (1 - (255/256)^84, about 28%)
  EXPECT_GT(r.p_me, 0.2);
  EXPECT_LT(r.p_me, 0.4);
}

TEST(ChannelScheme, ErrorsFallWithBlockLength) {
  const auto spec = rewrite_channel(0.1);
  const auto cap = capacity_ri(spec);
  SimParams p;
  p.epsilon = 0.7;
  p.rate_margin = 0.05;
  double last = 2.0;
  for (std::size_t n : {8, 12, 16}) {
    p.n = n;
    const auto r = simulate_channel_scheme(spec, cap.arg_pA, cap.arg_pX, 0.8 * cap.capacity, p);
    EXPECT_LT(r.p_me + r.p_xe, last);
    last = r.p_me + r.p_xe;
  }
  EXPECT_THROW(simulate_channel_scheme(spec, cap.arg_pA, cap.arg_pX, -1.0, p), InvalidInput);
}
