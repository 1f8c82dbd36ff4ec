#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace reactsim {

enum class LogLevel { Quiet = 0, Info = 1, Trace = 2 };

// REACT_SIM_LOG in {quiet, info, trace}; defaults to info.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("REACT_SIM_LOG");
    if (!env) return LogLevel::Info;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::Quiet;
    if (std::strcmp(env, "trace") == 0) return LogLevel::Trace;
    return LogLevel::Info;
  }();
  return level;
}

template <typename... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Info) {
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

template <typename... Args>
void log_trace(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::Trace) {
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

}  // namespace reactsim
