#pragma once

#include <string>

namespace stent::log {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Resolved once from STENT_TRACKER_LOG (error|info|debug); defaults to error.
Level level();

void error(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace stent::log
