#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axml/effects.hpp"
#include "axml/game.hpp"
#include "axml/insertion.hpp"
#include "axml/solver.hpp"
#include "axml/validation.hpp"

namespace axml {

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& text);

// automaton object: {"states":[...], "alphabet":[...], "initial":q,
// "accepting":[...], "open":[[q,a,q',p],...], "close":[[q,p,a,q'],...]}
Nwa parseNwaJson(const std::string& text);
std::string dumpNwaJson(const Nwa& a);
// completed and checked for determinism on load
Dnwa parseDnwaJson(const std::string& text);
std::string dumpDnwaJson(const Dnwa& d);

// same shape with formula strings: "open":[[q,a,"formula"],...],
// "close":[[q,p,a,"formula"],...]
Anwa parseAnwaJson(const std::string& text);
std::string dumpAnwaJson(const Anwa& a);

// anwa fields plus the simplicity witness (types, testState, localAccept,
// targetFn, optional failure); checkSimplicity runs on load
Sanwa parseSanwaJson(const std::string& text);
std::string dumpSanwaJson(const Sanwa& s);

// game object: alphabet, functions, rules (words or automaton per function),
// target (automaton object, {"dtd": text} or {"xsd": text}), optional
// validators ({"a": {"dtd": text}})
Game parseGameJson(const std::string& text);
std::string dumpGameJson(const Game& g);
std::optional<ValidationGame> parseValidationGameJson(const std::string& text);

InsertionGame parseInsertionGameJson(const std::string& text);
std::string dumpInsertionGameJson(const InsertionGame& g);

std::string dumpEffectsJson(const Game& g, const std::vector<CallEffect>& levels);
std::string dumpStrategyJson(const Strategy& s);

// Run summary printed by the CLI under --json. The counters are logical work
// counts, so reruns with identical inputs produce identical bytes.
struct RunReport {
  std::string command;
  std::string verdict;
  int exitCode = 0;
  std::string pipeline;
  std::string replay;
  std::map<std::string, uint64_t> counters;
  std::vector<std::string> warnings;
  std::optional<std::string> strategyJson;
  std::optional<std::string> witness;
  std::optional<std::string> error;
};

std::string dumpRunReport(const RunReport& r);

}  // namespace axml
