#include "mocap/server/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>

namespace mocap::server {

namespace {

std::atomic<LogLevel> g_threshold{LogLevel::Info};
std::mutex g_mu;

const char* name(LogLevel level) {
    switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
    }
    return "?";
}

} // namespace

void set_log_threshold(LogLevel level) { g_threshold.store(level); }

void log(LogLevel level, std::string_view message) {
    if (level < g_threshold.load()) {
        return;
    }
    std::string line = std::string("[") + name(level) + "] ";
    line.append(message);
    line.push_back('\n');
    std::lock_guard lock(g_mu);
    std::fputs(line.c_str(), stderr);
}

} // namespace mocap::server
