#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axml/automata.hpp"
#include "axml/nested_word.hpp"
#include "axml/schemas.hpp"

namespace axml {

// Replacement language of one function symbol: either an explicit finite list
// of well-nested words or an automaton.
struct ReplacementSpec {
  std::vector<NestedWord> words;  // sorted by length, then lexicographically
  std::optional<Nwa> automaton;

  bool isExplicit() const { return !automaton.has_value(); }
  void normalize();
};

struct Game {
  std::vector<Symbol> alphabet;   // sorted, unique
  std::vector<Symbol> functions;  // sorted, subset of alphabet
  std::map<Symbol, ReplacementSpec> rules;
  Dnwa target;
  // present when the target came from a grammar; enables the simple pipeline
  std::optional<Snwa> targetSnwa;
  std::optional<TreeGrammar> targetGrammar;

  bool isFunction(Symbol s) const;
  void validate() const;
};

struct ReplayMode {
  enum class Kind { None, Bounded, Unbounded };
  Kind kind = Kind::Unbounded;
  size_t bound = 1;  // Bounded only, >= 1

  static ReplayMode none() { return {Kind::None, 1}; }
  static ReplayMode bounded(size_t k) { return {Kind::Bounded, k}; }
  static ReplayMode unbounded() { return {Kind::Unbounded, 1}; }
  bool operator==(const ReplayMode&) const = default;
  std::string str() const;
};

}  // namespace axml
