#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace itact {

using WarningSink = std::function<void(std::string_view)>;

// Installs a sink for warnings and returns the previous one. The default sink
// writes "warning: <msg>" to stderr.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace itact
