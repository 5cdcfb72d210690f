#include "itact/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "itact/error.hpp"
#include "itact/log.hpp"

namespace itact {

std::string_view var_name(Var v) {
  switch (v) {
    case Var::X: return "X";
    case Var::A: return "A";
    case Var::Se: return "Se";
    case Var::Sd: return "Sd";
    case Var::Xhat: return "Xhat";
    case Var::U: return "U";
    case Var::Y: return "Y";
  }
  return "?";
}

std::optional<Var> parse_var(std::string_view name) {
  for (Var v : {Var::X, Var::A, Var::Se, Var::Sd, Var::Xhat, Var::U, Var::Y}) {
    if (var_name(v) == name) return v;
  }
  return std::nullopt;
}

void check_normalized(std::span<double> row, std::string_view what) {
  if (row.empty()) throw InvalidInput(std::string(what) + ": empty probability row");
  double sum = 0.0;
  for (double p : row) {
    if (!std::isfinite(p)) throw InvalidInput(std::string(what) + ": non-finite probability");
    if (p < 0.0) {
      std::ostringstream os;
      os << what << ": negative probability " << p;
      throw InvalidInput(os.str());
    }
    sum += p;
  }
  const double off = std::abs(sum - 1.0);
  if (off <= kNormTolerance) return;
  if (off <= kRenormTolerance) {
    std::ostringstream os;
    os << what << ": row sums to " << sum << ", renormalized";
    warn(os.str());
    for (double& p : row) p /= sum;
    return;
  }
  std::ostringstream os;
  os.precision(12);
  os << what << ": row sums to " << sum << " (tolerance " << kRenormTolerance << ")";
  throw InvalidInput(os.str());
}

std::size_t checked_product(std::span<const std::size_t> sizes, std::string_view what) {
  std::size_t n = 1;
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidInput(std::string(what) + ": alphabet size must be >= 1");
    if (n > kMaxCells / s) {
      throw ResourceLimit(std::string(what) + ": product alphabet exceeds 10^7 cells");
    }
    n *= s;
  }
  return n;
}

std::size_t flat_index(std::span<const std::size_t> sizes, std::span<const std::size_t> index) {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) flat = flat * sizes[i] + index[i];
  return flat;
}

std::vector<std::size_t> project_cells(std::span<const std::size_t> sizes,
                                       std::span<const std::size_t> axes) {
  // stride of each tensor axis inside the projected tensor
  std::vector<std::size_t> stride(sizes.size(), 0);
  std::size_t s = 1;
  for (std::size_t k = axes.size(); k-- > 0;) {
    stride[axes[k]] += s;
    s *= sizes[axes[k]];
  }
  std::size_t cells = 1;
  for (std::size_t n : sizes) cells *= n;

  std::vector<std::size_t> out(cells);
  std::vector<std::size_t> idx(sizes.size(), 0);
  std::size_t target = 0;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    out[cell] = target;
    for (std::size_t ax = sizes.size(); ax-- > 0;) {
      if (++idx[ax] < sizes[ax]) {
        target += stride[ax];
        break;
      }
      target -= stride[ax] * (sizes[ax] - 1);
      idx[ax] = 0;
    }
  }
  return out;
}

Pmf::Pmf(std::vector<double> probs, std::string_view what) : probs_(std::move(probs)) {
  check_normalized(probs_, what);
}

Pmf Pmf::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("uniform pmf: size must be >= 1");
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidInput("point mass: index out of range");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Pmf(std::move(p));
}

CondPmf::CondPmf(VarList cond_vars, std::vector<std::size_t> cond_sizes, VarList out_vars,
                 std::vector<std::size_t> out_sizes, std::vector<double> table,
                 std::string_view what)
    : cond_vars_(std::move(cond_vars)),
      out_vars_(std::move(out_vars)),
      cond_sizes_(std::move(cond_sizes)),
      out_sizes_(std::move(out_sizes)),
      table_(std::move(table)) {
  if (cond_vars_.size() != cond_sizes_.size() || out_vars_.size() != out_sizes_.size()) {
    throw InvalidInput(std::string(what) + ": label/size count mismatch");
  }
  if (out_vars_.empty()) throw InvalidInput(std::string(what) + ": no output variables");
  rows_ = checked_product(cond_sizes_, what);
  row_size_ = checked_product(out_sizes_, what);
  if (table_.size() != rows_ * row_size_) {
    std::ostringstream os;
    os << what << ": expected " << rows_ * row_size_ << " entries, got " << table_.size();
    throw InvalidInput(os.str());
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    check_normalized(std::span<double>(table_).subspan(r * row_size_, row_size_), what);
  }
}

CondPmf CondPmf::uniform(VarList cond_vars, std::vector<std::size_t> cond_sizes,
                         VarList out_vars, std::vector<std::size_t> out_sizes) {
  const std::size_t rows = checked_product(cond_sizes, "uniform conditional");
  const std::size_t width = checked_product(out_sizes, "uniform conditional");
  std::vector<double> table(rows * width, 1.0 / static_cast<double>(width));
  return CondPmf(std::move(cond_vars), std::move(cond_sizes), std::move(out_vars),
                 std::move(out_sizes), std::move(table));
}

double CondPmf::at(std::span<const std::size_t> cond, std::span<const std::size_t> out) const {
  return table_[flat_index(cond_sizes_, cond) * row_size_ + flat_index(out_sizes_, out)];
}

JointDist::JointDist(VarList vars, std::vector<std::size_t> sizes, std::vector<double> probs,
                     std::string_view what)
    : vars_(std::move(vars)), sizes_(std::move(sizes)), probs_(std::move(probs)) {
  if (vars_.size() != sizes_.size()) throw InvalidInput(std::string(what) + ": label/size mismatch");
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    for (std::size_t j = i + 1; j < vars_.size(); ++j) {
      if (vars_[i] == vars_[j]) {
        throw InvalidInput(std::string(what) + ": duplicate variable " +
                           std::string(var_name(vars_[i])));
      }
    }
  }
  const std::size_t n = checked_product(sizes_, what);
  if (probs_.size() != n) throw InvalidInput(std::string(what) + ": tensor size mismatch");
  check_normalized(probs_, what);
}

bool JointDist::has(Var v) const {
  return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
}

std::size_t JointDist::position(Var v) const {
  auto it = std::find(vars_.begin(), vars_.end(), v);
  if (it == vars_.end()) {
    throw InvalidInput("unknown variable " + std::string(var_name(v)) + " in joint distribution");
  }
  return static_cast<std::size_t>(it - vars_.begin());
}

std::vector<std::size_t> JointDist::projection(const VarList& keep) const {
  std::vector<std::size_t> axes;
  axes.reserve(keep.size());
  for (Var v : keep) axes.push_back(position(v));
  return project_cells(sizes_, axes);
}

JointDist JointDist::marginal(const VarList& keep) const {
  std::vector<std::size_t> sizes;
  sizes.reserve(keep.size());
  for (Var v : keep) sizes.push_back(size_of(v));
  const auto proj = projection(keep);
  std::vector<double> probs(checked_product(sizes, "marginal"), 0.0);
  for (std::size_t cell = 0; cell < probs_.size(); ++cell) probs[proj[cell]] += probs_[cell];
  return JointDist(keep, std::move(sizes), std::move(probs), "marginal");
}

}  // namespace itact
