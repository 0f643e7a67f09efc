#include "axml/game.hpp"

#include <algorithm>

#include "axml/util.hpp"

namespace axml {

namespace {

bool sortedUnique(const std::vector<Symbol>& v) {
  return std::is_sorted(v.begin(), v.end()) &&
         std::adjacent_find(v.begin(), v.end()) == v.end();
}

void checkSymbols(const NestedWord& w, const std::vector<Symbol>& alphabet,
                  const std::string& where) {
  for (const Tag& t : w.tags())
    if (!std::binary_search(alphabet.begin(), alphabet.end(), t.symbol))
      fail("SymbolNotInAlphabet", where + " uses " + t.symbol.str());
}

}  // namespace

void ReplacementSpec::normalize() {
  std::sort(words.begin(), words.end(), [](const NestedWord& x, const NestedWord& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  words.erase(std::unique(words.begin(), words.end()), words.end());
  if (automaton) automaton->normalizeStorage();
}

bool Game::isFunction(Symbol s) const {
  return std::binary_search(functions.begin(), functions.end(), s);
}

void Game::validate() const {
  if (alphabet.empty()) fail("InvalidGame", "empty alphabet");
  if (!sortedUnique(alphabet)) fail("InvalidGame", "alphabet not sorted or not unique");
  if (!sortedUnique(functions)) fail("InvalidGame", "function list not sorted or not unique");
  for (Symbol f : functions)
    if (!std::binary_search(alphabet.begin(), alphabet.end(), f))
      fail("InvalidGame", "function symbol " + f.str() + " outside the alphabet");

  if (rules.size() != functions.size())
    fail("InvalidGame", "need exactly one rule per function symbol");
  for (const auto& [f, spec] : rules) {
    if (!isFunction(f)) fail("InvalidGame", "rule for non-function symbol " + f.str());
    if (spec.isExplicit()) {
      if (spec.words.empty()) fail("EmptyReplacementLanguage", "R_" + f.str() + " has no words");
      for (const NestedWord& w : spec.words) checkSymbols(w, alphabet, "R_" + f.str());
    } else {
      if (!spec.words.empty())
        fail("InvalidGame", "rule for " + f.str() + " mixes explicit words and an automaton");
      spec.automaton->validate();
      if (spec.automaton->alphabet != alphabet)
        fail("AlphabetMismatch", "rule automaton for " + f.str());
    }
  }

  target.a.validate();
  if (target.a.alphabet != alphabet) fail("AlphabetMismatch", "target automaton");
  // the effect pipeline reads the pre-open state off the stack, so the target
  // must push the source state and answer every (state, symbol) query
  for (const std::string& q : target.a.states) {
    for (Symbol s : alphabet) {
      auto it = target.a.open.find({q, s});
      if (it == target.a.open.end() || it->second.empty())
        fail("NotTotal", "target has no open transition for (" + q + ", " + s.str() + ")");
      if (it->second.front().second != q)
        fail("NotNormalForm", "target open at (" + q + ", " + s.str() + ") does not push its source");
      for (const std::string& h : target.a.states)
        if (!target.a.close.count({q, h, s}))
          fail("NotTotal",
               "target has no close transition for (" + q + ", " + h + ", " + s.str() + ")");
    }
  }
}

std::string ReplayMode::str() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::Bounded:
      return "bounded(" + std::to_string(bound) + ")";
    case Kind::Unbounded:
      return "unbounded";
  }
  return "unbounded";
}

}  // namespace axml
