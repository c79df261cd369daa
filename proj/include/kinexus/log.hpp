#pragma once

#include <string>

namespace kinexus {

enum class LogLevel { Off = 0, Error, Warn, Info, Debug };

/// Level comes from the KINEXUS_LOG environment variable
/// (off|error|warn|info|debug), default warn. Messages go to stderr only;
/// run outputs never depend on the log level.
LogLevel log_level();
void set_log_level(LogLevel level);

void log(LogLevel level, const std::string& msg);

inline void log_error(const std::string& msg) { log(LogLevel::Error, msg); }
inline void log_warn(const std::string& msg) { log(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log(LogLevel::Debug, msg); }

}  // namespace kinexus
