#pragma once

#include <string_view>

namespace kga::log {

enum class Level { Off = 0, Info = 1, Debug = 2 };

/// Level read once from the KGA_LOG environment variable (off|info|debug).
Level level();

bool enabled(Level lvl);

/// Writes "[kga] <msg>" to stderr when the level is active.
void info(std::string_view msg);
void debug(std::string_view msg);

}  // namespace kga::log
