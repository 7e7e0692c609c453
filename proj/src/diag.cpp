#include "ocpm/diag.hpp"

#include <cstdio>
#include <cstdlib>
#include <string_view>

namespace ocpm::diag {

namespace {

Level read_threshold() {
    const char* env = std::getenv("OCPM_LOG_LEVEL");
    if (env == nullptr) return Level::Warn;
    const std::string_view v{env};
    if (v == "error") return Level::Error;
    if (v == "warn") return Level::Warn;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
}

const char* name(Level level) {
    switch (level) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

} // namespace

Level threshold() {
    static const Level t = read_threshold();
    return t;
}

void emit(Level level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) return;
    std::fprintf(stderr, "ocpm: %s: %s\n", name(level), message.c_str());
}

} // namespace ocpm::diag
