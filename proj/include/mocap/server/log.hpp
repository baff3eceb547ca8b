#pragma once

#include <string_view>

namespace mocap::server {

enum class LogLevel { Debug, Info, Warn, Error };

/// Line-atomic diagnostics on stderr. Messages below the threshold are discarded.
void log(LogLevel level, std::string_view message);
void set_log_threshold(LogLevel level);

} // namespace mocap::server
