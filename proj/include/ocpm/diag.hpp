#pragma once

#include <string>

namespace ocpm::diag {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold read from OCPM_LOG_LEVEL ("error" | "warn" | "info" | "debug"),
/// defaulting to warn. Evaluated once per process.
Level threshold();

/// Writes "ocpm: <level>: <message>" to stderr when `level` passes the
/// threshold.
void emit(Level level, const std::string& message);

inline void warn(const std::string& message) { emit(Level::Warn, message); }
inline void info(const std::string& message) { emit(Level::Info, message); }
inline void debug(const std::string& message) { emit(Level::Debug, message); }

} // namespace ocpm::diag
