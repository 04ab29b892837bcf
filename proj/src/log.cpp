#include "kga/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace kga::log {

Level level() {
  static Level cached = [] {
    const char* env = std::getenv("KGA_LOG");
    if (env == nullptr) return Level::Off;
    std::string value(env);
    if (value == "debug") return Level::Debug;
    if (value == "info") return Level::Info;
    return Level::Off;
  }();
  return cached;
}

bool enabled(Level lvl) { return static_cast<int>(level()) >= static_cast<int>(lvl); }

void info(std::string_view msg) {
  if (enabled(Level::Info)) std::cerr << "[kga] " << msg << "\n";
}

void debug(std::string_view msg) {
  if (enabled(Level::Debug)) std::cerr << "[kga:debug] " << msg << "\n";
}

}  // namespace kga::log
