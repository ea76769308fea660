#include "sptc/logging.hpp"

#include <chrono>
#include <cstdio>
#include <mutex>

#include <nlohmann/json.hpp>

namespace sptc {

namespace {

bool g_enabled = false;
std::mutex g_mutex;

void emit(const char* level, const std::string& event, const LogFields& fields) {
    nlohmann::json j;
    j["ts"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count();
    j["level"] = level;
    j["event"] = event;
    for (const auto& [k, v] : fields) j[k] = v;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

void set_log_enabled(bool enabled) { g_enabled = enabled; }
bool log_enabled() { return g_enabled; }

void log_info(const std::string& event, const LogFields& fields) {
    if (g_enabled) emit("info", event, fields);
}

void log_warn(const std::string& event, const LogFields& fields) {
    if (g_enabled) emit("warn", event, fields);
}

void log_error(const std::string& code, const std::string& message) {
    emit("error", code, {{"message", message}});
}

}  // namespace sptc
