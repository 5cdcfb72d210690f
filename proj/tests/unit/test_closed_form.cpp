#include <gtest/gtest.h>

#include "itact/channel_cap.hpp"
#include "itact/closed_form.hpp"
#include "itact/info.hpp"
#include "itact/rng.hpp"
#include "oracle.hpp"

using namespace itact;

TEST(ClosedForm, CommonReconstructionRate) {
  EXPECT_NEAR(r_cr_binary(0.25, 0.1), oracle::h(0.3) - oracle::h(0.1), 1e-12);
  EXPECT_NEAR(r_cr_binary(0.25, 0.1), 0.41230, 1e-5);
  EXPECT_NEAR(r_cr_binary(0.25, 0.0), oracle::h(0.25), 1e-12);
  EXPECT_EQ(r_cr_binary(0.25, 0.5), 0.0);
}

TEST(ClosedForm, WynerZivEnvelope) {
  const auto r = r_wz_binary(0.25, 0.1);
  EXPECT_NEAR(r.rate, 0.41118, 5e-5);
  // the envelope point must reproduce the distortion it claims
  EXPECT_NEAR(r.theta * r.beta + (1 - r.theta) * 0.25, 0.1, 1e-9);
  EXPECT_EQ(r_wz_binary(0.25, 0.25).rate, 0.0);
  EXPECT_EQ(r_wz_binary(0.25, 0.4).rate, 0.0);
}

TEST(ClosedForm, WynerZivNeverAboveCommonReconstruction) {
  for (int i = 0; i <= 100; ++i) {
    const double D = 0.25 * i / 100.0;
    EXPECT_LE(r_wz_binary(0.25, D).rate, r_cr_binary(0.25, D) + 1e-9) << "D=" << D;
  }
}

TEST(ClosedForm, GeneralBinaryCrMatchesSymmetricCase) {
  EXPECT_NEAR(r_cr_binary_general(0.5, 0.25, 0.1), r_cr_binary(0.25, 0.1), 1e-6);
  // a point-mass source needs no rate
  EXPECT_NEAR(r_cr_binary_general(0.0, 0.25, 0.1), 0.0, 1e-9);
}

TEST(ClosedForm, RewriteObjectiveAgreesWithInfoCore) {
  CounterRng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const RewriteParams prm{0.5 * rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(),
                            rng.uniform()};
    const auto v = rewrite_objective(prm);
    const auto j = assemble_channel_joint(rewrite_channel(prm.delta), rewrite_action_pmf(prm), rewrite_input_cond(prm));
    ASSERT_NEAR(v.objective, channel_objective(j), 1e-9);
    ASSERT_NEAR(v.slack, condition_slack(j), 1e-9);
  }
}

TEST(ClosedForm, RewriteCapacity) {
  EXPECT_NEAR(rewrite_capacity(0.1, true).capacity, 0.5310, 3e-3);
  EXPECT_NEAR(rewrite_capacity(0.1, false).capacity, 0.6690, 3e-3);
  EXPECT_NEAR(rewrite_capacity(0.0, true).capacity, 1.0, 1e-9);
  EXPECT_NEAR(rewrite_capacity(0.0, false).capacity, 1.0, 1e-9);
  for (double d : {0.0, 0.05, 0.1, 0.2, 0.3, 0.5}) {
    EXPECT_LE(rewrite_capacity(d, true).capacity, rewrite_capacity(d, false).capacity + 1e-9);
  }
}

TEST(ClosedForm, BinaryCurveMonotone) {
  std::vector<double> Ds;
  for (int i = 0; i <= 10; ++i) Ds.push_back(0.025 * i);
  std::vector<std::vector<CurvePoint>> nocr;
  for (double C : {0.0, 0.5, 1.0}) {
    const auto cr = binary_rd_curve({0.25, C, true}, Ds);
    nocr.push_back(binary_rd_curve({0.25, C, false}, Ds));
    for (std::size_t k = 1; k < Ds.size(); ++k) {
      EXPECT_LE(cr[k].rate, cr[k - 1].rate + 1e-6);
      EXPECT_LE(nocr.back()[k].rate, nocr.back()[k - 1].rate + 1e-6);
    }
    for (std::size_t k = 0; k < Ds.size(); ++k) EXPECT_LE(nocr.back()[k].rate, cr[k].rate + 1e-9);
  }
  for (std::size_t k = 0; k < Ds.size(); ++k) {
    EXPECT_LE(nocr[1][k].rate, nocr[0][k].rate + 1e-6);
    EXPECT_LE(nocr[2][k].rate, nocr[1][k].rate + 1e-6);
  }
  // endpoints: C = 0 is plain rate-distortion, C = 1 with CR is the closed form
  const auto c0 = binary_rd_curve({0.25, 0.0, true}, {0.1});
  EXPECT_NEAR(c0[0].rate, 1.0 - oracle::h(0.1), 1e-6);
  const auto c1 = binary_rd_curve({0.25, 1.0, true}, {0.1});
  EXPECT_NEAR(c1[0].rate, r_cr_binary(0.25, 0.1), 1e-6);
}
