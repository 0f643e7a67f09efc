#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "axml/game.hpp"
#include "axml/solver.hpp"

namespace axml {

enum class InsertMode { General, WeakReplay, NoReplay };
std::string insertModeName(InsertMode m);

// Like a rewriting game, but a Call at </a> inserts a word after the factor
// instead of replacing it. The mode fixes where reading resumes: before the
// factor (General), at the inserted word (WeakReplay), or after it (NoReplay).
struct InsertionGame {
  std::vector<Symbol> alphabet;
  std::vector<Symbol> functions;
  std::map<Symbol, ReplacementSpec> insertions;
  Dnwa target;

  bool isFunction(Symbol s) const;
  void validate() const;
};

// every factor gains a primed twin right after it: <a>v</a><a'></a'>
NestedWord muTransform(const NestedWord& w);
// strips the twins again; rejects words that are not in the image
NestedWord muDecode(const NestedWord& w);

// rewriting game over the doubled alphabet whose primed anchors stand for
// insertion points; WeakReplay maps to Unbounded, NoReplay to None
std::pair<Game, NestedWord> insertionToReplacement(const InsertionGame& ig, const NestedWord& w);

// insertion game with a backspace symbol wrapping each replacement; the
// target tracks (current state, state to rewind to); Unbounded maps to
// WeakReplay, None to NoReplay
std::pair<InsertionGame, NestedWord> replacementToInsertion(const Game& g, const NestedWord& w);

struct InsertionOracleLimits {
  size_t maxCalls = 6;  // iterative deepening ceiling on total calls
  size_t maxSteps = 2000000;
  size_t maxWordLen = 4096;
};

struct InsertionOracleResult {
  Verdict verdict = Verdict::Inconclusive;
  size_t steps = 0;
  size_t callsUsed = 0;  // smallest call budget that already decided the game
};

// minimax with explicit insertion positions; exact when it terminates within
// the budget, Inconclusive only if a larger budget could still change it
InsertionOracleResult insertionOracleSolve(const InsertionGame& ig, const NestedWord& w,
                                           InsertMode mode,
                                           const InsertionOracleLimits& limits = {});

// decision procedure: WeakReplay and NoReplay via the replacement transform,
// General via the deepening oracle (may stay Inconclusive)
SolveResult decideInsertion(const InsertionGame& ig, const NestedWord& w, InsertMode mode,
                            const SolveOptions& opt = {});

}  // namespace axml
