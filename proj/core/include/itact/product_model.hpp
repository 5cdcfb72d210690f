#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "itact/distributions.hpp"
#include "itact/simplex_opt.hpp"

namespace itact {

/// Joint distribution written as a product of fixed factors and parametric
/// conditionals P(out | cond), each conditional being one simplex block of
/// the optimizer's stacked parameter vector.
class ProductModel {
 public:
  ProductModel(VarList vars, std::vector<std::size_t> sizes);

  /// Multiplies a fixed factor indexed row-major by `on` into every cell.
  void multiply_fixed(const VarList& on, std::span<const double> table);

  /// Adds P(out | cond) as a new simplex block and returns its index.
  std::size_t add_block(const VarList& cond, Var out);

  const VarList& vars() const { return vars_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t cells() const { return base_.size(); }
  const SimplexShape& shape() const { return shape_; }
  std::size_t dim() const { return dim_; }
  std::size_t block_offset(std::size_t b) const { return blocks_[b].offset; }
  std::span<const double> block(std::span<const double> x, std::size_t b) const {
    return x.subspan(blocks_[b].offset, shape_[b].rows * shape_[b].size);
  }

  void joint(std::span<const double> x, std::span<double> out) const;

  /// dx = d(cells)/dx^T dcell.
  void pullback(std::span<const double> x, std::span<const double> dcell, std::span<double> dx) const;

  /// Cell to marginal-index map for the listed variables.
  std::vector<std::size_t> projection(const VarList& keep) const;
  std::size_t marginal_size(const VarList& keep) const;
  std::size_t axis(Var v) const;

  JointDist to_joint(std::span<const double> x) const;

  /// Uniform rows for every block.
  std::vector<double> uniform_point() const;

 private:
  struct Block {
    std::size_t offset = 0;
    std::vector<std::uint32_t> index;  // per cell, position inside the block
  };

  VarList vars_;
  std::vector<std::size_t> sizes_;
  std::vector<double> base_;
  std::vector<Block> blocks_;
  SimplexShape shape_;
  std::size_t dim_ = 0;
};

/// Function of the joint cell vector; `dcell` receives the gradient when non-empty.
using CellFn = std::function<double(std::span<const double> cells, std::span<double> dcell)>;

/// Linear combination of entropies of marginals plus expectations and a constant.
class InfoExpr {
 public:
  explicit InfoExpr(const ProductModel& model) : model_(&model) {}

  InfoExpr& entropy(double coef, const VarList& over, const VarList& given = {});
  InfoExpr& mutual_info(double coef, const VarList& a, const VarList& b, const VarList& given = {});
  /// Adds coef * sum_cell p(cell) w(cell).
  InfoExpr& expectation(double coef, std::span<const double> per_cell);
  InfoExpr& constant(double c);

  double operator()(std::span<const double> cells, std::span<double> dcell) const;

 private:
  struct Term {
    std::uint32_t mask = 0;
    double coef = 0.0;
    std::vector<std::size_t> proj;
    std::size_t msize = 1;
  };
  void add_set(double coef, const VarList& vars);

  const ProductModel* model_;
  std::vector<Term> terms_;
  std::vector<double> linear_;
  double constant_ = 0.0;
};

/// Lifts a cell function to a ScalarFn over the model parameters. The model
/// must outlive the returned function.
ScalarFn lift(std::shared_ptr<const ProductModel> model, CellFn fn);

}  // namespace itact
