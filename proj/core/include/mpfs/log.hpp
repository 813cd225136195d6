#pragma once

#include <functional>
#include <string_view>

namespace mpfs {

using WarningSink = std::function<void(std::string_view)>;

/// Replace the warning sink (default writes to stderr). Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace mpfs
