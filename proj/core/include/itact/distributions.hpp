#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "itact/variables.hpp"

namespace itact {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kRenormTolerance = 1e-6;
inline constexpr std::size_t kMaxCells = 10'000'000;
/// Largest auxiliary alphabet any solver accepts.
inline constexpr std::size_t kMaxAuxSize = 16;

/// Checks one probability row in place. Entries must be finite and >= 0.
/// A sum within 1e-9 of one is accepted as is, within 1e-6 it is renormalized
/// with a warning, anything further off throws InvalidInput.
void check_normalized(std::span<double> row, std::string_view what);

/// Product of sizes with the dense-tensor guard applied.
std::size_t checked_product(std::span<const std::size_t> sizes, std::string_view what);

/// Row-major flat index of a multi-index.
std::size_t flat_index(std::span<const std::size_t> sizes, std::span<const std::size_t> index);

/// For every cell of a row-major tensor with the given axis sizes, the flat
/// index of its projection onto the listed axes (in the listed order).
std::vector<std::size_t> project_cells(std::span<const std::size_t> sizes,
                                       std::span<const std::size_t> axes);

class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::vector<double> probs, std::string_view what = "pmf");

  static Pmf uniform(std::size_t n);
  static Pmf point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Conditional pmf stored as a dense table [cond...][out...], row-major.
/// Every row (fixed conditioning index) is a pmf over the output variables.
class CondPmf {
 public:
  CondPmf() = default;
  CondPmf(VarList cond_vars, std::vector<std::size_t> cond_sizes, VarList out_vars,
          std::vector<std::size_t> out_sizes, std::vector<double> table,
          std::string_view what = "conditional pmf");

  static CondPmf uniform(VarList cond_vars, std::vector<std::size_t> cond_sizes,
                         VarList out_vars, std::vector<std::size_t> out_sizes);

  const VarList& cond_vars() const { return cond_vars_; }
  const VarList& out_vars() const { return out_vars_; }
  const std::vector<std::size_t>& cond_sizes() const { return cond_sizes_; }
  const std::vector<std::size_t>& out_sizes() const { return out_sizes_; }

  std::size_t rows() const { return rows_; }
  std::size_t row_size() const { return row_size_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(table_).subspan(r * row_size_, row_size_);
  }
  std::span<const double> table() const { return table_; }

  double at(std::span<const std::size_t> cond, std::span<const std::size_t> out) const;

 private:
  VarList cond_vars_;
  VarList out_vars_;
  std::vector<std::size_t> cond_sizes_;
  std::vector<std::size_t> out_sizes_;
  std::size_t rows_ = 0;
  std::size_t row_size_ = 0;
  std::vector<double> table_;
};

/// Normalized probability tensor over an ordered tuple of labeled variables.
class JointDist {
 public:
  JointDist() = default;
  JointDist(VarList vars, std::vector<std::size_t> sizes, std::vector<double> probs,
            std::string_view what = "joint distribution");

  const VarList& vars() const { return vars_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t cells() const { return probs_.size(); }

  bool has(Var v) const;
  /// Position of `v` in vars(); throws InvalidInput for unknown labels.
  std::size_t position(Var v) const;
  std::size_t size_of(Var v) const { return sizes_[position(v)]; }

  /// Marginal over `keep`, laid out in the order given.
  JointDist marginal(const VarList& keep) const;

  /// For every cell, the flat index of its projection onto `keep`.
  std::vector<std::size_t> projection(const VarList& keep) const;

 private:
  VarList vars_;
  std::vector<std::size_t> sizes_;
  std::vector<double> probs_;
};

}  // namespace itact
