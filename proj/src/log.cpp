#include "invfilter/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace invfilter {

LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("INVFILTER_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

void log_msg(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
  const char* tag = level == LogLevel::error  ? "error"
                    : level == LogLevel::info ? "info"
                                              : "debug";
  std::fprintf(stderr, "[invfilter %s] %s\n", tag, message.c_str());
}

}  // namespace invfilter
