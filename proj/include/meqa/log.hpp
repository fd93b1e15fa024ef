#pragma once

#include <string_view>

namespace meqa::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level level);
Level level();

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace meqa::log
