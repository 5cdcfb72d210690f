#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace itact {

struct CheckOutcome {
  std::string name;
  std::string description;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest violation seen, measured in the units the tolerance applies to.
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  bool pass = false;
};

struct CheckOptions {
  std::uint64_t seed = 2024;
  /// 0 keeps each suite's default case count.
  std::size_t cases = 0;
  std::size_t threads = 1;
};

/// Names accepted by run_check, in their default order.
const std::vector<std::string>& check_names();

CheckOutcome run_check(const std::string& name, const CheckOptions& opts = {});

}  // namespace itact
