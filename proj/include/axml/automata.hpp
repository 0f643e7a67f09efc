#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "axml/nested_word.hpp"

namespace axml {

// Nondeterministic nested-word automaton. Open transitions produce a linear
// successor and push a hierarchical state; close transitions consume the
// popped hierarchical state. Missing entries simply have no successor.
struct Nwa {
  std::vector<std::string> states;     // sorted, unique
  std::vector<Symbol> alphabet;        // sorted, unique
  std::string initial;
  std::vector<std::string> accepting;  // sorted, unique

  // (q, a) -> list of (linear successor, pushed state)
  std::map<std::pair<std::string, Symbol>, std::vector<std::pair<std::string, std::string>>> open;
  // (q, popped, a) -> list of successors
  std::map<std::tuple<std::string, std::string, Symbol>, std::vector<std::string>> close;

  bool isAccepting(const std::string& q) const;
  bool hasState(const std::string& q) const;
  bool hasSymbol(Symbol s) const;
  // sorts and dedupes all vectors; call after hand-building
  void normalizeStorage();
  // referential integrity of every transition endpoint
  void validate() const;
};

// Deterministic and total by construction: makeDnwa completes missing
// transitions with a fresh non-accepting sink before validating.
struct Dnwa {
  Nwa a;
  std::string sink;  // completion sink, empty if the input was already total

  const std::pair<std::string, std::string>& openStep(const std::string& q, Symbol s) const;
  const std::string& closeStep(const std::string& q, const std::string& h, Symbol s) const;
};

// completes, then rejects duplicated (q,a) / (q,h,a) entries
Dnwa makeDnwa(Nwa raw);

// state reached from `from` after reading w (w must use the automaton's alphabet)
std::string runDnwa(const Dnwa& d, const std::string& from, const NestedWord& w);
bool dnwaAccepts(const Dnwa& d, const NestedWord& w);

bool nwaAccepts(const Nwa& a, const NestedWord& w);

// same state set, opens push the source state, closes rewired accordingly;
// a no-op (bit-identical) on automata already in that shape
Dnwa toNormalForm(const Dnwa& d);

// synchronous product, recognizes the intersection; alphabets must agree
Dnwa product(const Dnwa& x, const Dnwa& y);

// complement within well-formed words over the same alphabet
Dnwa complementDnwa(const Dnwa& d);

// pairs (q, q') such that some well-matched word takes q to q'
std::set<std::pair<std::string, std::string>> wellMatchedReach(const Dnwa& d);

// single accepting state, accepts every well-formed word over the alphabet
Dnwa universalDnwa(const std::vector<Symbol>& alphabet);

// trie-shaped acceptor for a finite list of words, in normal form
Dnwa wordListDnwa(const std::vector<NestedWord>& words, const std::vector<Symbol>& alphabet);
Nwa wordListNwa(const std::vector<NestedWord>& words, const std::vector<Symbol>& alphabet);

}  // namespace axml
