#include "stent/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace stent::log {

Level level() {
  static const Level resolved = [] {
    const char* env = std::getenv("STENT_TRACKER_LOG");
    if (!env) return Level::kError;
    const std::string v(env);
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    return Level::kError;
  }();
  return resolved;
}

void error(const std::string& msg) { std::fprintf(stderr, "[error] %s\n", msg.c_str()); }

void info(const std::string& msg) {
  if (level() >= Level::kInfo) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void debug(const std::string& msg) {
  if (level() >= Level::kDebug) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

}  // namespace stent::log
