#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "axml/alternating.hpp"
#include "axml/automata.hpp"
#include "axml/nested_word.hpp"

namespace axml {

// Regular expression over interned symbols. Text form: '.' concatenation,
// '+' union, postfix '*' and '?', literals eps / empty, parentheses.
struct Dre {
  enum class Kind { Empty, Epsilon, Sym, Concat, Union, Star, Opt };
  Kind kind = Kind::Empty;
  Symbol sym;
  std::vector<Dre> kids;
};

Dre parseDre(const std::string& text);
std::string printDre(const Dre& d);

Dre dreEmpty();
Dre dreEpsilon();
Dre dreSym(Symbol s);
Dre dreConcat(std::vector<Dre> kids);
Dre dreUnion(std::vector<Dre> kids);
Dre dreStar(Dre kid);
Dre dreOpt(Dre kid);

struct DreWitness {
  std::vector<Symbol> prefix;  // word after which the next symbol is ambiguous
  Symbol symbol;
  size_t pos1 = 0, pos2 = 0;  // conflicting marked positions, 1-based in-order
};

struct DreDeterminism {
  bool deterministic = true;
  std::optional<DreWitness> witness;
};

// an expression is deterministic when no two equally-labelled marked positions
// compete in the first set or in any follow set
DreDeterminism dreCheckDeterminism(const Dre& d);

struct Dfa {
  size_t nStates = 0;
  size_t initial = 0;
  std::vector<bool> accepting;
  std::vector<Symbol> alphabet;
  std::map<std::pair<size_t, Symbol>, size_t> trans;  // partial, missing = reject
};

bool dfaAccepts(const Dfa& d, const std::vector<Symbol>& word);
// adds an explicit dead state and totalizes over the given alphabet
Dfa completeDfa(const Dfa& d, const std::vector<Symbol>& alphabet);

// position (Glushkov) automaton; rejects nondeterministic expressions
Dfa dreToDfa(const Dre& d);

// Regular tree grammar with named types, one label and one content model per
// type. Content models are DREs over type names (each interned as a Symbol).
struct TreeGrammar {
  std::vector<std::string> types;  // sorted, unique
  std::string start;
  std::map<std::string, Symbol> label;
  std::map<std::string, Dre> content;

  bool hasType(const std::string& t) const;
  void validate() const;
};

// text form, one declaration per line:
//   start NAME
//   type NAME label LABEL -> DRE
//   element NAME -> DRE        (shorthand: type and label coincide)
TreeGrammar parseGrammar(const std::string& text);
std::string printGrammar(const TreeGrammar& g);

struct GrammarClass {
  enum class Kind { Local, SingleType, Neither } kind = Kind::Local;
  // witness for Neither: two competing types inside one content model
  std::string containerType, typeA, typeB;
};

GrammarClass classifyGrammar(const TreeGrammar& g);

// deterministic nested-word acceptor for a single-type grammar: linear states
// pair a content-DFA state with the type being read, plus an absorbing
// failure sink; closes advance the parent DFA when the child was locally valid
struct Snwa {
  Dnwa d;
  std::string bot;       // failure sink state
  std::string rootType;  // virtual type wrapping the start symbol
  std::string junkType;  // type assigned below undeclared labels
  std::map<std::string, std::string> typeOfState;
  std::map<Symbol, std::set<std::string>> localAccept;
  // post-close state: reading <a>...</a> from q lands here
  std::map<std::pair<std::string, Symbol>, std::string> targetFn;
};

// extraAlphabet extends the label set (games mention symbols the schema does
// not declare); such labels type as junk and never validate
Snwa grammarToSnwa(const TreeGrammar& g, const std::vector<Symbol>& extraAlphabet = {});

// membership of a single rooted tree, decided by typed recursion; exact also
// for grammars that are not single-type (candidate child types are tracked
// per position against the content model)
bool grammarValidateTree(const TreeGrammar& g, const NestedWord& w);

// the same language under the simple-automaton interface: reads push the
// post-close state together with a test-state branch that checks the content
Sanwa snwaAsSanwa(const Snwa& s);

}  // namespace axml
