#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "axml/game.hpp"
#include "axml/schemas.hpp"
#include "axml/solver.hpp"

namespace axml {

// Replay-free game in which a Call at </a> is only allowed while the current
// rewritten factor is valid for the validator DTD attached to a.
struct ValidationGame {
  Game base;  // target automaton compiled from the DTD below
  TreeGrammar targetDtd;
  std::map<Symbol, TreeGrammar> validators;

  void validate() const;
};

// bit i = membership in schema i of the declared schema set
using ProfileMask = uint32_t;

// schema set: the target DTD first, then the distinct validator DTDs in a
// canonical order (by their printed form)
std::vector<const TreeGrammar*> schemaSet(const ValidationGame& vg);

// full validity of one rooted tree against every schema in the set
ProfileMask profileOfTree(const std::vector<const TreeGrammar*>& schemas, const NestedWord& tree);

// labels and profiles of the trees occurring in replacement forests of f
std::set<std::pair<Symbol, ProfileMask>> computeSigma(const ValidationGame& vg, Symbol f);

// Backward induction over a flat word: at each position Juliet reads, or (for
// symbols present in callReach) calls, after which Romeo picks any state from
// callReach[symbol][state]; Juliet wins when the final state accepts.
// callReach entries consume the position like a read of the replacement.
bool flatReplayFreeSolve(const std::vector<Symbol>& word, const Dfa& dfa,
                         const std::map<Symbol, std::vector<std::set<size_t>>>& callReach);

struct ValidationResult {
  Verdict verdict = Verdict::Inconclusive;
  size_t flatGames = 0;       // per-node flat games solved
  size_t dossierEntries = 0;  // candidate outcome sets confirmed
};

// bottom-up dossier computation per node, one flat replay-free game per
// candidate outcome set; exact for replay-free validated play
ValidationResult validationSolve(const ValidationGame& vg, const NestedWord& w, ReplayMode mode);

// direct minimax over configurations with the validity guard evaluated on
// the current factor before every Call
OracleResult bruteForceValidationSolve(const ValidationGame& vg, const NestedWord& w,
                                       const OracleLimits& limits = {});

}  // namespace axml
