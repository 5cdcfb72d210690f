#pragma once

#include <iosfwd>

namespace itact {

/// Entry point of the itact tool. Returns 0 on success, 1 on invalid input and
/// 2 when an optimizer did not converge or a check failed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace itact
