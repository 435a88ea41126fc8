#include "afc/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace afc::log {

namespace {

Level from_env() {
    const char* v = std::getenv("AFC_LOG");
    if (!v) return Level::Warn;
    const std::string_view s(v);
    if (s == "error") return Level::Error;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}

std::atomic<int>& current() {
    static std::atomic<int> l{static_cast<int>(from_env())};
    return l;
}

std::mutex& sink() {
    static std::mutex m;
    return m;
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }

void set_level(Level l) { current() = static_cast<int>(l); }

void write(Level l, const std::string& message) {
    if (static_cast<int>(l) > current().load()) return;
    static constexpr const char* tags[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(sink());
    std::cerr << "[afc " << tags[static_cast<int>(l)] << "] " << message << '\n';
}

}  // namespace afc::log
