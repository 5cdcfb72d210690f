#include <gtest/gtest.h>

#include <cmath>

#include "itact/error.hpp"
#include "itact/simplex_opt.hpp"
#include "oracle.hpp"

using namespace itact;

namespace {

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

// I(X;Y) for input law x over a channel given as rows W[x][y].
double mutual_info(std::span<const double> px, const std::vector<std::vector<double>>& W) {
  const std::size_t ny = W[0].size();
  std::vector<double> py(ny, 0.0);
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y) py[y] += px[x] * W[x][y];
  double i = 0.0;
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (px[x] > 0 && W[x][y] > 0) i += px[x] * W[x][y] * std::log2(W[x][y] / py[y]);
  return i;
}

}  // namespace

TEST(ProjectToSimplex, KnownProjections) {
  const double a[] = {0.2, 0.3, 0.5};
  auto p = project_to_simplex(a);
  EXPECT_NEAR(p[0], 0.2, 1e-15);
  const double b[] = {2.0, 0.0};
  p = project_to_simplex(b);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  const double c[] = {0.5, 0.5, 0.5};
  p = project_to_simplex(c);
  EXPECT_NEAR(p[2], 1.0 / 3.0, 1e-15);
  const double d[] = {1.0, 0.8, -3.0};
  p = project_to_simplex(d);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.4, 1e-15);
  EXPECT_EQ(p[2], 0.0);
}

TEST(ProjectOntoShape, RowWise) {
  std::vector<double> x{3.0, 1.0, 0.25, 0.25, 0.7};
  project_onto_shape({{1, 2}, {1, 3}}, x);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[2] + x[3] + x[4], 1.0, 1e-15);
  EXPECT_EQ(shape_dof({{1, 2}, {2, 3}}), 5u);
  EXPECT_EQ(shape_dim({{1, 2}, {2, 3}}), 8u);
}

TEST(Optimize, MaxEntropyIsUniform) {
  OptProblem p;
  p.shape = {{1, 5}};
  p.sense = Sense::Maximize;
  p.objective.value = [](std::span<const double> x) { return entropy_bits(x); };
  const auto r = optimize(p);
  EXPECT_NEAR(r.value, std::log2(5.0), 1e-6);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.multimodal);
}

TEST(Optimize, LinearWithConstraint) {
  // maximize x0 subject to x1 >= 0.3
  OptProblem p;
  p.shape = {{1, 3}};
  p.sense = Sense::Maximize;
  p.objective.value = [](std::span<const double> x) { return x[0]; };
  p.constraints.push_back({[](std::span<const double> x) { return x[1] - 0.3; }, nullptr});
  const auto r = optimize(p);
  EXPECT_NEAR(r.value, 0.7, 1e-5);
  ASSERT_EQ(r.active_flags.size(), 1u);
  EXPECT_TRUE(r.active_flags[0]);
  EXPECT_GE(r.constraint_slacks[0], -1e-7);
}

TEST(Optimize, InfeasibleThrows) {
  OptProblem p;
  p.shape = {{1, 2}};
  p.objective.value = [](std::span<const double> x) { return x[0]; };
  p.constraints.push_back({[](std::span<const double> x) { return x[0] + x[1] - 2.0; }, nullptr});
  OptOptions o;
  o.starts = 4;
  EXPECT_THROW(optimize(p, o), Infeasible);
}

TEST(Optimize, ChannelCapacitiesAgainstClosedForms) {
  const std::vector<std::vector<double>> bsc{{0.89, 0.11}, {0.11, 0.89}};
  const std::vector<std::vector<double>> z{{1.0, 0.0}, {0.3, 0.7}};
  for (const auto* W : {&bsc, &z}) {
    OptProblem p;
    p.shape = {{1, 2}};
    p.sense = Sense::Maximize;
    p.objective.value = [W](std::span<const double> x) { return mutual_info(x, *W); };
    const auto r = optimize(p);
    const double want = W == &bsc ? 1.0 - oracle::h(0.11) : oracle::z_capacity(0.3);
    EXPECT_NEAR(r.value, want, 1e-7);
  }
}

TEST(Optimize, AnalyticGradientMatchesFiniteDifferences) {
  OptProblem p;
  p.shape = {{2, 3}};
  p.sense = Sense::Minimize;
  const std::vector<double> target{0.1, 0.2, 0.7, 0.5, 0.25, 0.25};
  p.objective.value = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
    return s;
  };
  auto with_grad = p;
  with_grad.objective.value_grad = [&](std::span<const double> x, std::span<double> g) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += (x[i] - target[i]) * (x[i] - target[i]);
      g[i] = 2.0 * (x[i] - target[i]);
    }
    return s;
  };
  const auto a = optimize(p), b = optimize(with_grad);
  EXPECT_NEAR(a.value, 0.0, 1e-9);
  EXPECT_NEAR(b.value, 0.0, 1e-9);
  for (std::size_t i = 0; i < target.size(); ++i) EXPECT_NEAR(b.argument[i], target[i], 1e-4);
}

TEST(Optimize, SameSeedSameResult) {
  OptProblem p;
  p.shape = {{2, 3}};
  p.sense = Sense::Maximize;
  p.objective.value = [](std::span<const double> x) {
    return std::sin(5 * x[0]) + std::cos(7 * x[4]) * x[1] + x[2] * x[5];
  };
  OptOptions o;
  o.seed = 42;
  o.starts = 16;
  const auto a = optimize(p, o), b = optimize(p, o);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argument, b.argument);
  o.threads = 4;
  const auto c = optimize(p, o);
  EXPECT_EQ(a.value, c.value);
}

TEST(Sweep, WarmStartsAndRecordsErrors) {
  auto family = [](std::span<const double> prm) {
    OptProblem p;
    p.shape = {{1, 2}};
    p.sense = Sense::Maximize;
    const double t = prm[0];
    p.objective.value = [](std::span<const double> x) { return x[0]; };
    p.constraints.push_back({[t](std::span<const double> x) { return t - x[0]; }, nullptr});
    return p;
  };
  const auto rows = sweep(family, {{0.2}, {0.5}, {-1.0}}, {});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].result->value, 0.2, 1e-5);
  EXPECT_NEAR(rows[1].result->value, 0.5, 1e-5);
  EXPECT_FALSE(rows[2].result.has_value());
  EXPECT_FALSE(rows[2].error.empty());
}
