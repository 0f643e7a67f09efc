#include "axml/util.hpp"

#include <cstdlib>
#include <iostream>

namespace axml {

LogLevel logLevel() {
  static const LogLevel level = [] {
    const char* env = std::getenv("AXML_GAMES_LOG");
    if (env == nullptr) return LogLevel::Off;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Off;
  }();
  return level;
}

void logInfo(const std::string& msg) {
  if (logLevel() >= LogLevel::Info) std::cerr << "[axml] " << msg << '\n';
}

void logDebug(const std::string& msg) {
  if (logLevel() >= LogLevel::Debug) std::cerr << "[axml] " << msg << '\n';
}

}  // namespace axml
