#pragma once

#include <functional>
#include <string_view>

namespace mcgp {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (default writes to stderr). Pass nullptr to silence.
void set_log_sink(LogSink sink);
void log_warning(std::string_view message);

}  // namespace mcgp
