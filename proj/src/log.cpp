#include "kinexus/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace kinexus {

namespace {

LogLevel parse_env() {
  const char* env = std::getenv("KINEXUS_LOG");
  if (env == nullptr) return LogLevel::Warn;
  if (std::strcmp(env, "off") == 0) return LogLevel::Off;
  if (std::strcmp(env, "error") == 0) return LogLevel::Error;
  if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}

LogLevel g_level = parse_env();

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
    default: return "?";
  }
}

}  // namespace

LogLevel log_level() { return g_level; }

void set_log_level(LogLevel level) { g_level = level; }

void log(LogLevel level, const std::string& msg) {
  if (level == LogLevel::Off || static_cast<int>(level) > static_cast<int>(g_level)) return;
  std::fprintf(stderr, "[kinexus] %s: %s\n", level_name(level), msg.c_str());
}

}  // namespace kinexus
