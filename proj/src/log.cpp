#include "meqa/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace meqa::log {

namespace {

std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

void emit(Level l, const char* tag, std::string_view message) {
  if (l < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[" << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void debug(std::string_view message) { emit(Level::Debug, "debug", message); }
void info(std::string_view message) { emit(Level::Info, "info", message); }
void warn(std::string_view message) { emit(Level::Warn, "warn", message); }
void error(std::string_view message) { emit(Level::Error, "error", message); }

}  // namespace meqa::log
