#include "itact/product_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "itact/error.hpp"
#include "itact/info.hpp"

namespace itact {

ProductModel::ProductModel(VarList vars, std::vector<std::size_t> sizes)
    : vars_(std::move(vars)), sizes_(std::move(sizes)) {
  if (vars_.size() != sizes_.size()) throw InvalidInput("product model: label/size mismatch");
  base_.assign(checked_product(sizes_, "product model"), 1.0);
}

std::size_t ProductModel::axis(Var v) const {
  auto it = std::find(vars_.begin(), vars_.end(), v);
  if (it == vars_.end()) throw InvalidInput("product model: unknown variable " + std::string(var_name(v)));
  return static_cast<std::size_t>(it - vars_.begin());
}

std::vector<std::size_t> ProductModel::projection(const VarList& keep) const {
  std::vector<std::size_t> axes;
  for (Var v : keep) axes.push_back(axis(v));
  return project_cells(sizes_, axes);
}

std::size_t ProductModel::marginal_size(const VarList& keep) const {
  std::size_t n = 1;
  for (Var v : keep) n *= sizes_[axis(v)];
  return n;
}

void ProductModel::multiply_fixed(const VarList& on, std::span<const double> table) {
  const auto proj = projection(on);
  if (table.size() != marginal_size(on)) throw InvalidInput("product model: factor size mismatch");
  for (std::size_t c = 0; c < base_.size(); ++c) base_[c] *= table[proj[c]];
}

std::size_t ProductModel::add_block(const VarList& cond, Var out) {
  if (blocks_.size() >= 16) throw InvalidInput("product model: at most 16 parametric blocks");
  VarList on = cond;
  on.push_back(out);
  const auto proj = projection(on);
  Block b;
  b.offset = dim_;
  b.index.assign(proj.begin(), proj.end());
  const SimplexBlock sb{marginal_size(cond), sizes_[axis(out)]};
  dim_ += sb.rows * sb.size;
  shape_.push_back(sb);
  blocks_.push_back(std::move(b));
  return blocks_.size() - 1;
}

void ProductModel::joint(std::span<const double> x, std::span<double> out) const {
  for (std::size_t c = 0; c < base_.size(); ++c) {
    double p = base_[c];
    for (const auto& b : blocks_) p *= x[b.offset + b.index[c]];
    out[c] = p;
  }
}

void ProductModel::pullback(std::span<const double> x, std::span<const double> dcell,
                            std::span<double> dx) const {
  std::fill(dx.begin(), dx.end(), 0.0);
  const std::size_t nb = blocks_.size();
  double factors[16];
  for (std::size_t c = 0; c < base_.size(); ++c) {
    const double w = dcell[c] * base_[c];
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < nb; ++k) factors[k] = x[blocks_[k].offset + blocks_[k].index[c]];
    for (std::size_t k = 0; k < nb; ++k) {
      double prod = w;
      for (std::size_t j = 0; j < nb; ++j) {
        if (j != k) prod *= factors[j];
      }
      dx[blocks_[k].offset + blocks_[k].index[c]] += prod;
    }
  }
}

JointDist ProductModel::to_joint(std::span<const double> x) const {
  std::vector<double> cells(base_.size());
  joint(x, cells);
  return JointDist(vars_, sizes_, std::move(cells), "model joint");
}

std::vector<double> ProductModel::uniform_point() const {
  std::vector<double> x;
  for (const auto& b : shape_) x.insert(x.end(), b.rows * b.size, 1.0 / static_cast<double>(b.size));
  return x;
}

void InfoExpr::add_set(double coef, const VarList& vars) {
  if (vars.empty() || coef == 0.0) return;
  std::uint32_t mask = 0;
  for (Var v : vars) {
    model_->axis(v);
    mask |= 1u << static_cast<unsigned>(v);
  }
  for (auto& t : terms_) {
    if (t.mask == mask) {
      t.coef += coef;
      return;
    }
  }
  VarList ordered;
  for (Var v : model_->vars()) {
    if (mask & (1u << static_cast<unsigned>(v))) ordered.push_back(v);
  }
  Term t;
  t.mask = mask;
  t.coef = coef;
  t.proj = model_->projection(ordered);
  t.msize = model_->marginal_size(ordered);
  terms_.push_back(std::move(t));
}

InfoExpr& InfoExpr::entropy(double coef, const VarList& over, const VarList& given) {
  VarList all = over;
  all.insert(all.end(), given.begin(), given.end());
  add_set(coef, all);
  add_set(-coef, given);
  return *this;
}

InfoExpr& InfoExpr::mutual_info(double coef, const VarList& a, const VarList& b, const VarList& given) {
  VarList ag = a, bg = b, abg = a;
  ag.insert(ag.end(), given.begin(), given.end());
  bg.insert(bg.end(), given.begin(), given.end());
  abg.insert(abg.end(), b.begin(), b.end());
  abg.insert(abg.end(), given.begin(), given.end());
  add_set(coef, ag);
  add_set(coef, bg);
  add_set(-coef, abg);
  add_set(-coef, given);
  return *this;
}

InfoExpr& InfoExpr::expectation(double coef, std::span<const double> per_cell) {
  if (per_cell.size() != model_->cells()) throw InvalidInput("expectation: per-cell size mismatch");
  if (linear_.empty()) linear_.assign(model_->cells(), 0.0);
  for (std::size_t c = 0; c < linear_.size(); ++c) linear_[c] += coef * per_cell[c];
  return *this;
}

InfoExpr& InfoExpr::constant(double c) {
  constant_ += c;
  return *this;
}

double InfoExpr::operator()(std::span<const double> cells, std::span<double> dcell) const {
  const bool grad = !dcell.empty();
  if (grad) std::fill(dcell.begin(), dcell.end(), 0.0);
  double value = constant_;
  std::vector<double> m;
  for (const auto& t : terms_) {
    if (t.coef == 0.0) continue;
    m.assign(t.msize, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) m[t.proj[c]] += cells[c];
    double h = 0.0;
    for (double& p : m) {
      if (p >= kTinyProb) {
        const double lp = std::log2(p);
        h -= p * lp;
        p = lp;
      } else {
        p = std::log2(std::max(p, 1e-300));
      }
    }
    value += t.coef * h;
    if (grad) {
      constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
      for (std::size_t c = 0; c < cells.size(); ++c) dcell[c] -= t.coef * (m[t.proj[c]] + inv_ln2);
    }
  }
  if (!linear_.empty()) {
    for (std::size_t c = 0; c < cells.size(); ++c) value += cells[c] * linear_[c];
    if (grad) {
      for (std::size_t c = 0; c < cells.size(); ++c) dcell[c] += linear_[c];
    }
  }
  return value;
}

ScalarFn lift(std::shared_ptr<const ProductModel> model, CellFn fn) {
  ScalarFn out;
  out.value = [model, fn](std::span<const double> x) {
    std::vector<double> cells(model->cells());
    model->joint(x, cells);
    return fn(cells, {});
  };
  out.value_grad = [model, fn](std::span<const double> x, std::span<double> g) {
    std::vector<double> cells(model->cells()), dcell(model->cells());
    model->joint(x, cells);
    const double v = fn(cells, dcell);
    model->pullback(x, dcell, g);
    return v;
  };
  return out;
}

}  // namespace itact
