#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "axml/automata.hpp"
#include "axml/nested_word.hpp"

namespace axml {

// Positive boolean formula over transition atoms. Open-transition atoms carry
// a (linear successor, pushed state) pair; close-transition atoms carry just
// the successor (h stays empty).
struct Formula {
  enum class Kind { True, False, Atom, And, Or };
  Kind kind = Kind::False;
  std::string q, h;
  std::vector<Formula> kids;
  bool operator==(const Formula&) const = default;
};

Formula fTrue();
Formula fFalse();
Formula fAtom(std::string q, std::string h = "");
// empty conjunction collapses to True, empty disjunction to False,
// single-element lists to the element itself
Formula fAnd(std::vector<Formula> kids);
Formula fOr(std::vector<Formula> kids);

// evaluates with atomFn(q, h) -> bool deciding each atom
template <typename F>
bool evalFormula(const Formula& f, F&& atomFn) {
  switch (f.kind) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Atom:
      return atomFn(f.q, f.h);
    case Formula::Kind::And:
      for (const Formula& k : f.kids)
        if (!evalFormula(k, atomFn)) return false;
      return true;
    case Formula::Kind::Or:
      for (const Formula& k : f.kids)
        if (evalFormula(k, atomFn)) return true;
      return false;
  }
  return false;
}

// collects the distinct (q, h) atom pairs
void collectAtoms(const Formula& f, std::set<std::pair<std::string, std::string>>& out);

// text form: '|' binds loosest, then '&'; atoms are "(q,h)" or "q";
// literals "true" / "false"; parentheses group
Formula parseFormula(const std::string& text);
std::string printFormula(const Formula& f);

// Alternating nested-word automaton. Missing transition entries mean False.
// True ends a run branch early with no further obligation. A word is accepted
// if some run tree exists whose every surviving branch reaches the end of the
// word in an accepting state.
struct Anwa {
  std::vector<std::string> states;     // sorted, unique
  std::vector<Symbol> alphabet;        // sorted, unique
  std::string initial;
  std::vector<std::string> accepting;  // sorted, unique
  std::map<std::pair<std::string, Symbol>, Formula> open;
  std::map<std::tuple<std::string, std::string, Symbol>, Formula> close;

  bool isAccepting(const std::string& q) const;
  bool hasState(const std::string& q) const;
  bool hasSymbol(Symbol s) const;
  void normalizeStorage();
  void validate() const;
};

bool anwaMembership(const Anwa& a, const NestedWord& w);

// complements the language: swaps And/Or and True/False, complements the
// accepting set, and materializes absent entries as True first
Anwa anwaDual(const Anwa& a);

// recognizes the intersection of the two languages; extra tracker states keep
// running the Nwa when a branch of the alternating side ends early on True
Anwa anwaIntersectNwa(const Anwa& a, const Nwa& b);

struct EmptinessResult {
  bool nonEmpty = false;
  std::optional<NestedWord> witness;  // shortest, in canonical tag order
  // true when the whole bounded space was covered; false when the word budget
  // ran out first, so emptiness is only known for the words actually checked
  bool exhausted = true;
};

// searches words in length-lexicographic order with every node's child count
// and the number of top-level factors bounded by maxWidth, depth bounded by
// maxDepth, and at most maxWords membership checks
EmptinessResult anwaEmptinessBounded(const Anwa& a, size_t maxDepth, size_t maxWidth,
                                     size_t maxWords = 100000);

// Typing data that turns an Anwa into a simple one. Close formulas may only
// look at the popped state: for h outside the special states they must be
// exactly Atom(targetFn(h, a)); for the test state they must be True or False
// matching local acceptance of the current state, for the anti-test state the
// complement of that.
struct SimplicityWitness {
  std::map<std::string, std::string> typeOf;  // every linear state except the special ones
  std::string testState;
  // like testState with the local-acceptance check complemented; lets an
  // automaton assert that an enclosed factor does NOT validate
  std::optional<std::string> antiTestState;
  std::optional<std::string> failure;                // absorbing, compatible with every type
  std::map<Symbol, std::set<std::string>> localAccept;
  std::map<std::pair<std::string, Symbol>, std::string> targetFn;
};

struct Sanwa {
  Anwa a;
  SimplicityWitness w;

  const std::string& typeName(const std::string& q) const;
  bool locallyAccepting(const std::string& q, Symbol s) const;
  // targetFn lookup; failure maps to itself
  const std::string& target(const std::string& h, Symbol s) const;
};

// validates the witness against the automaton
Sanwa checkSimplicity(const Anwa& a, const SimplicityWitness& w);

// membership for simple automata: branches through a pushed state other than
// the test state jump across the enclosed factor via targetFn, only test-state
// branches descend and check local acceptance at the matching close
bool sanwaVerify(const Sanwa& s, const NestedWord& word);

// complement under the sanwaVerify semantics: dualized open formulas,
// complemented local and global acceptance
Sanwa sanwaDual(const Sanwa& s);

struct SanwaNonemptyResult {
  bool nonEmpty = false;
  // work accounting, used to check the theoretical budget bounds
  size_t concatRounds = 0;
  size_t nestingRounds = 0;
  size_t budgetConcat = 0;
  size_t budgetNesting = 0;
  bool withinBudgets = true;
  size_t elements = 0;
};

// decides emptiness of L(a) ∩ L(b) by saturating summary claims
// (A-state pair, per-B-state frontier map) bottom-up
SanwaNonemptyResult sanwaNwaNonempty(const Nwa& a, const Sanwa& b);

}  // namespace axml
