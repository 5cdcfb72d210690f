#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace itact {

/// Labels of the finite random variables that appear in source and channel
/// systems.
enum class Var : std::uint8_t { X, A, Se, Sd, Xhat, U, Y };

using VarList = std::vector<Var>;

std::string_view var_name(Var v);
std::optional<Var> parse_var(std::string_view name);

/// Canonical orderings used for every dense tensor layout.
inline const VarList& source_order() {
  static const VarList order{Var::X, Var::A, Var::Se, Var::Sd, Var::Xhat, Var::U};
  return order;
}
inline const VarList& channel_order() {
  static const VarList order{Var::A, Var::Se, Var::Sd, Var::X, Var::Y, Var::U};
  return order;
}

}  // namespace itact
