#include <gtest/gtest.h>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "itact/source_rdc.hpp"
#include "oracle.hpp"

using namespace itact;

TEST(SourceRdc, MinimaAndInfeasibleQueries) {
  const auto spec = binary_action_source(0.25);
  EXPECT_EQ(min_distortion(spec), 0.0);
  EXPECT_EQ(min_cost(spec), 0.0);
  EXPECT_THROW(rd_ac_cr(spec, {-0.1, 1.0}), InvalidInput);
  auto costly = spec;
  costly.cost = {0.5, 1.0};
  EXPECT_THROW(rd_ac_cr(costly, {0.1, 0.2}), Infeasible);
}

TEST(SourceRdc, CommonReconstructionMatchesBinaryFormula) {
  const auto spec = binary_wz_source(0.25);
  for (double D : {0.0, 0.05, 0.1, 0.2, 0.3}) {
    const double want = std::max(0.0, oracle::h(oracle::conv(0.25, D)) - oracle::h(D));
    EXPECT_NEAR(rd_ac_cr(spec, {D, 0.0}).rate, want, 2e-4) << "D=" << D;
  }
}

TEST(SourceRdc, NoSideInformationWhenActionsUnaffordable) {
  const auto spec = binary_action_source(0.25);
  for (double D : {0.0, 0.1, 0.3, 0.5}) {
    EXPECT_NEAR(rd_ac_cr(spec, {D, 0.0}).rate, std::max(0.0, 1.0 - oracle::h(D)), 2e-4) << "D=" << D;
  }
}

TEST(SourceRdc, LosslessRateIsConditionalEntropy) {
  const auto spec = binary_action_source(0.1);
  // at D = 0 with A = 1 for free, R = H(X|Sd) = h(0.1)
  const auto r = rd_ac_cr(spec, {0.0, 1.0});
  EXPECT_NEAR(r.rate, oracle::h(0.1), 2e-4);
  EXPECT_LE(r.achieved_distortion, 1e-6);
}

TEST(SourceRdc, AlternativeFormAgrees) {
  const auto spec = binary_action_source(0.25);
  for (RdcQuery q : {RdcQuery{0.1, 0.5}, RdcQuery{0.05, 0.8}, RdcQuery{0.2, 0.2}}) {
    EXPECT_NEAR(rd_ac_cr(spec, q).rate, rd_ac_cr_alt(spec, q).rate, 2e-4);
  }
}

TEST(SourceRdc, ReportedDistributionsReproduceTheRate) {
  const auto spec = binary_action_source(0.25);
  const auto r = rd_ac_cr(spec, {0.1, 0.6});
  EXPECT_NEAR(evaluate_cr_rate(spec, r.arg_paX, r.arg_pXhat), r.rate, 1e-9);
  EXPECT_LE(r.achieved_distortion, 0.1 + 1e-6);
  EXPECT_LE(r.achieved_cost, 0.6 + 1e-6);
}

TEST(SourceRdc, WithoutCommonReconstructionNeverHigher) {
  const auto spec = binary_action_source(0.25);
  for (RdcQuery q : {RdcQuery{0.1, 1.0}, RdcQuery{0.2, 0.5}}) {
    const auto cr = rd_ac_cr(spec, q);
    const auto nocr = rd_ac(spec, q, 0, {}, &cr);
    EXPECT_LE(nocr.rate, cr.rate + 1e-9);
    EXPECT_FALSE(nocr.decoder.empty());
  }
  EXPECT_THROW(rd_ac(spec, {0.1, 1.0}, 17), InvalidInput);
}

TEST(SourceRdc, WithoutCommonReconstructionMatchesWynerZivAtD01) {
  // independently tabulated value of the binary Wyner-Ziv function, p0=0.25, D=0.1
  const auto spec = binary_wz_source(0.25);
  EXPECT_NEAR(rd_ac(spec, {0.1, 0.0}).rate, 0.41118, 5e-4);
}

TEST(SourceRdc, RegionCorner) {
  const auto spec = binary_action_source(0.25);
  const auto reg = rd_region(spec, {0.1, 0.5});
  EXPECT_NEAR(reg.sum_min, rd_ac_cr(spec, {0.1, 0.5}).rate, 2e-4);
  EXPECT_GE(reg.r1_min, -1e-9);
  EXPECT_LE(reg.r1_min, reg.sum_min + 1e-9);
}

TEST(SourceRdc, SteinbergCase) {
  const auto spec = binary_wz_source(0.25);
  for (double D : {0.05, 0.15}) {
    EXPECT_NEAR(rd_steinberg(spec, D).rate, oracle::h(oracle::conv(0.25, D)) - oracle::h(D), 2e-4);
  }
  EXPECT_THROW(rd_steinberg(binary_action_source(0.25), 0.1), InvalidInput);
}
