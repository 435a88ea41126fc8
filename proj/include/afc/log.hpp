#pragma once

#include <string>

namespace afc::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Reads AFC_LOG (error|warn|info|debug) once; defaults to warn.
Level level();
void set_level(Level l);

void write(Level l, const std::string& message);
inline void error(const std::string& m) { write(Level::Error, m); }
inline void warn(const std::string& m) { write(Level::Warn, m); }
inline void info(const std::string& m) { write(Level::Info, m); }
inline void debug(const std::string& m) { write(Level::Debug, m); }

}  // namespace afc::log
