#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace rpomdp {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level from ROBUST_POMDP_LOG in {error, info, debug}; defaults to error.
inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("ROBUST_POMDP_LOG");
        if (!env) return LogLevel::Error;
        std::string v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

inline void log(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    const char* tag = level == LogLevel::Error ? "error" : level == LogLevel::Info ? "info" : "debug";
    std::cerr << "[" << tag << "] " << message << "\n";
}

}  // namespace rpomdp
