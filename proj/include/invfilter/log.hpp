#pragma once

#include <string>

namespace invfilter {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Threshold from INVFILTER_LOG (error|info|debug); defaults to error.
LogLevel log_threshold();

void log_msg(LogLevel level, const std::string& message);

}  // namespace invfilter
