#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itact/distributions.hpp"

namespace itact {

/// One simplex of width `size` for each of `rows` conditioning indices.
struct SimplexBlock {
  std::size_t rows = 1;
  std::size_t size = 1;
};
using SimplexShape = std::vector<SimplexBlock>;

std::size_t shape_dim(const SimplexShape& shape);
/// Number of free scalars: sum of rows * (size - 1).
std::size_t shape_dof(const SimplexShape& shape);

enum class Sense { Minimize, Maximize };

/// Scalar function of the stacked parameter vector. `value_grad` is optional;
/// without it gradients come from central differences.
struct ScalarFn {
  std::function<double(std::span<const double>)> value;
  std::function<double(std::span<const double>, std::span<double>)> value_grad;
};

struct OptProblem {
  SimplexShape shape;
  Sense sense = Sense::Minimize;
  ScalarFn objective;
  /// Each constraint must be >= 0 at a feasible point.
  std::vector<ScalarFn> constraints;
  /// Optional known-feasible point; infeasible local solutions are pulled
  /// toward it by bisection.
  std::vector<double> anchor;
};

struct OptOptions {
  std::size_t starts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::size_t max_iter = 2000;
  double activity_tol = 1e-4;
  double feasibility_tol = 1e-7;
  /// Tried before the grid and random starts, in order.
  std::vector<std::vector<double>> initial_points;
  /// 1 = serial, 0 = ITACT_THREADS / hardware default.
  std::size_t threads = 1;
};

struct OptResult {
  double value = 0.0;
  std::vector<double> argument;
  std::vector<double> constraint_slacks;
  std::vector<bool> active_flags;
  std::size_t starts_used = 0;
  std::size_t iterations = 0;
  std::size_t best_start = 0;
  bool converged = false;
  /// Converged starts ended more than 1e-3 apart.
  bool multimodal = false;
};

/// Multi-start projected gradient with an augmented Lagrangian for the
/// constraints. Throws Infeasible when no start ends feasible and
/// OptimizerFailure on a non-finite objective at a feasible point.
OptResult optimize(const OptProblem& problem, const OptOptions& opts = {});

/// Euclidean projection onto the probability simplex.
Pmf project_to_simplex(std::span<const double> v);

/// Row-wise projection of a stacked vector onto a product of simplices.
void project_onto_shape(const SimplexShape& shape, std::span<double> x);

struct SweepRow {
  std::vector<double> params;
  std::optional<OptResult> result;
  std::string error;
};

/// Solves one problem per grid point. Each point is warm-started from the
/// previous point's argument; failures are recorded per row.
std::vector<SweepRow> sweep(const std::function<OptProblem(std::span<const double>)>& family,
                            const std::vector<std::vector<double>>& grid, const OptOptions& opts);

}  // namespace itact
