#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "axml/alternating.hpp"
#include "axml/effects.hpp"
#include "axml/game.hpp"

namespace axml {

enum class Verdict { JulietWins, RomeoWins, Inconclusive };
std::string verdictName(Verdict v);

// One point of the rewriting play: the current word, the replacement context
// of every tag (original tags sit at 1, replacement tags one deeper than the
// replaced factor), and the reading position.
struct Configuration {
  NestedWord word;
  std::vector<uint32_t> depth;
  size_t pos = 0;
};

// Decision tree for Juliet; at a Call node the children follow the
// replacement words of the called symbol in their normalized order, at a Read
// node the single child (if any) is the next decision point.
struct StrategyNode {
  size_t position = 0;  // index of the close tag in the word at decision time
  std::string state;    // target state reached right before that close
  bool call = false;
  std::vector<StrategyNode> children;
};

struct Strategy {
  std::optional<StrategyNode> root;
};

enum class Pipeline { Auto, General, Simple };

struct SolveOptions {
  Pipeline pipeline = Pipeline::Auto;
  IterateOptions iterate;
};

struct SolveStats {
  std::string pipeline;   // route actually taken
  size_t iterations = 0;  // fixpoint iterate applications (unbounded replay)
  EffectStats effects;
};

struct SolveResult {
  Verdict verdict = Verdict::Inconclusive;
  SolveStats stats;
  std::string note;  // set when the verdict is Inconclusive
};

// acceptance automaton of the rewriting game: reads of function closes keep
// the target's step, calls branch over the recorded call options at the
// pre-open state (the target is brought to normal form first)
Anwa buildAc(const Game& g, const CallEffect& c);

// the same construction on a grammar-backed target, staying simple: call
// options move into the open formulas as extra pushed states
Sanwa buildAcSimple(const Game& g, const CallEffect& c);

SolveResult decideJWin(const Game& g, const NestedWord& w, ReplayMode mode,
                       const SolveOptions& opt = {});

struct OracleLimits {
  size_t maxSteps = 2000000;
  size_t maxWordLen = 4096;
};

struct OracleResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Strategy> strategy;  // present when Juliet wins
  size_t steps = 0;
};

// explicit minimax over configurations, memoized on the rewritten word;
// replay is tracked per tag, so Bounded(k) terminates by construction
OracleResult bruteForceSolve(const Game& g, const NestedWord& w, ReplayMode mode,
                             const OracleLimits& limits = {});

// winning strategy extracted from the effect pipeline by greedy simulation,
// preferring Read; NotWinnable when Juliet does not win (w, mode)
Strategy extractStrategy(const Game& g, const NestedWord& w, ReplayMode mode,
                         const SolveOptions& opt = {});

// replays a strategy against every Romeo choice; true when all plays accept
bool strategyWins(const Game& g, const NestedWord& w, ReplayMode mode, const Strategy& s);

struct PlayResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string transcript;
};

// line-based play on streams; the engine takes the other side
PlayResult interactivePlay(const Game& g, const NestedWord& w, ReplayMode mode,
                           bool humanIsJuliet, std::istream& in, std::ostream& out);

}  // namespace axml
