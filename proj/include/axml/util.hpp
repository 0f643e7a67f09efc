#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace axml {

// Every library error carries a stable kind tag so callers (and the CLI) can
// switch on it without parsing the human-readable message.
struct AxmlError : std::runtime_error {
  std::string kind;
  AxmlError(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

[[noreturn]] inline void fail(std::string kind, const std::string& msg) {
  throw AxmlError(std::move(kind), msg);
}

enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

// Level comes from AXML_GAMES_LOG ("info" / "debug"), read once.
LogLevel logLevel();
void logInfo(const std::string& msg);
void logDebug(const std::string& msg);

// Deterministic seeded generator (splitmix64). Integer sampling only, so the
// stream is identical on every platform for a given seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); n must be positive
  uint64_t below(uint64_t n) { return next() % n; }

  // inclusive bounds
  int intIn(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // true with probability num/den
  bool chance(uint64_t num, uint64_t den) { return below(den) < num; }

 private:
  uint64_t state_;
};

}  // namespace axml
