#include <gtest/gtest.h>

#include "itact/error.hpp"
#include "itact/info.hpp"
#include "oracle.hpp"

using namespace itact;

namespace {

JointDist bsc_joint(double p) {
  return JointDist({Var::X, Var::Y}, {2, 2}, {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

}  // namespace

TEST(Entropy, UniformAndPointMass) {
  const JointDist u({Var::X}, {4}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(entropy(u, {Var::X}), 2.0, 1e-12);
  const JointDist d({Var::X}, {3}, {0.0, 1.0, 0.0});
  EXPECT_NEAR(entropy(d, {Var::X}), 0.0, 1e-12);
  EXPECT_EQ(entropy(u, {}), 0.0);
}

TEST(Entropy, ConditionalOnBsc) {
  const auto j = bsc_joint(0.1);
  EXPECT_NEAR(entropy(j, {Var::Y}, {Var::X}), oracle::h(0.1), 1e-12);
  EXPECT_NEAR(entropy(j, {Var::X, Var::Y}), 1.0 + oracle::h(0.1), 1e-12);
}

TEST(MutualInformation, BscCapacityAtUniformInput) {
  const auto j = bsc_joint(0.11);
  EXPECT_NEAR(mutual_information(j, {Var::X}, {Var::Y}), 1.0 - oracle::h(0.11), 1e-12);
  EXPECT_NEAR(mutual_information(j, {Var::Y}, {Var::X}), 1.0 - oracle::h(0.11), 1e-12);
}

TEST(MutualInformation, OverlapRejected) {
  const auto j = bsc_joint(0.2);
  EXPECT_THROW(mutual_information(j, {Var::X}, {Var::X, Var::Y}), InvalidInput);
}

TEST(MutualInformation, ConditionalOnMarkovChainVanishes) {
  // X -> Y -> Z through two BSCs
  std::vector<double> p(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) p[x * 4 + y * 2 + z] = 0.5 * (x == y ? 0.8 : 0.2) * (y == z ? 0.7 : 0.3);
  const JointDist j({Var::X, Var::Y, Var::Se}, {2, 2, 2}, p);
  EXPECT_NEAR(mutual_information(j, {Var::X}, {Var::Se}, {Var::Y}), 0.0, 1e-12);
  EXPECT_NEAR(verify_markov(j, {Var::X}, {Var::Y}, {Var::Se}), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information(j, {Var::X}, {Var::Se}), 1.0 - oracle::h(oracle::conv(0.2, 0.3)), 1e-12);
  EXPECT_GT(verify_markov(j, {Var::X}, {}, {Var::Se}), 0.01);
}

TEST(BinaryEntropy, Values) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
  EXPECT_NEAR(binary_entropy(0.11), 0.4999167, 1e-6);
}

TEST(Star, ValuesAndRange) {
  EXPECT_NEAR(star(0.25, 0.1), 0.3, 1e-15);
  EXPECT_NEAR(star(0.5, 0.3), 0.5, 1e-15);
  EXPECT_THROW(star(1.5, 0.1), InvalidInput);
}

TEST(AssembleJoint, SourceMarginalsMatchSpec) {
  const auto spec = binary_action_source(0.25);
  const CondPmf paX({Var::X}, {2}, {Var::A}, {2}, {0.3, 0.7, 0.3, 0.7});
  const auto pXhat = CondPmf::uniform({Var::X, Var::Se, Var::A}, {2, 1, 2}, {Var::Xhat}, {2});
  const auto j = assemble_source_joint(spec, paX, pXhat);
  const auto a = j.marginal({Var::A});
  EXPECT_NEAR(a.probs()[1], 0.7, 1e-12);
  // action 1 shows X through BSC(0.25), action 0 an independent bit
  EXPECT_NEAR(mutual_information(j, {Var::X}, {Var::Sd}, {Var::A}), 0.7 * (1 - oracle::h(0.25)), 1e-12);
  EXPECT_NEAR(mutual_information(j, {Var::Xhat}, {Var::X, Var::Sd}, {Var::A}), 0.0, 1e-12);
}

TEST(AssembleJoint, ChannelOutputLaw) {
  const auto spec = rewrite_channel(0.1);
  const Pmf pA({0.5, 0.5});
  const CondPmf pX({Var::A, Var::Se}, {2, 2}, {Var::X}, {2}, {0, 1, 0, 1, 0, 1, 0, 1});
  const auto j = assemble_channel_joint(spec, pA, pX);
  // always rewriting: Y is A through BSC(0.1)
  EXPECT_NEAR(mutual_information(j, {Var::A}, {Var::Y}), 1.0 - oracle::h(0.1), 1e-12);
}
