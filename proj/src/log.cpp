#include "fdmac/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace fdmac {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::Warn)};
std::mutex g_mutex;

void emit(const char* tag, std::string_view msg) {
  const std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "[fdmac " << tag << "] " << msg << '\n';
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void log_warn(std::string_view msg) {
  if (g_level.load() >= static_cast<int>(LogLevel::Warn)) emit("warn", msg);
}

void log_info(std::string_view msg) {
  if (g_level.load() >= static_cast<int>(LogLevel::Info)) emit("info", msg);
}

}  // namespace fdmac
