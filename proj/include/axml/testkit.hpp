#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "axml/alternating.hpp"
#include "axml/effects.hpp"
#include "axml/game.hpp"
#include "axml/insertion.hpp"
#include "axml/schemas.hpp"
#include "axml/util.hpp"
#include "axml/validation.hpp"

namespace axml {

// Closed prenex QBF: variable i (1-based) is quantified by prefix[i-1];
// clauses hold DIMACS-style literals.
struct Qbf {
  std::vector<bool> isExists;
  std::vector<std::vector<int>> clauses;

  size_t vars() const { return isExists.size(); }
};

// recursive expansion; TooManyVariables beyond 20
bool qbfEval(const Qbf& q);

// QDIMACS subset: p cnf header, e/a quantifier lines, clause lines
Qbf parseQdimacs(const std::string& text);
std::string printQdimacs(const Qbf& q);

// word <v1>...<vn><X></X></vn>...</v1> plus an alternating automaton that
// accepts it exactly when the formula is true: existential levels branch
// disjunctively, universal ones conjunctively, and every clause is checked
// against the assignment recorded in the pushed states on the way out
std::pair<Anwa, NestedWord> qbfToAnwa(const Qbf& q);

// --- deterministic generators and enumerators for tests ---

NestedWord randomWord(Rng& rng, const std::vector<Symbol>& alphabet, size_t maxLen,
                      size_t maxDepth);

// all words whose depth, node child counts and top-level factor count respect
// the bounds, in (length, tag order) order
std::vector<NestedWord> enumerateWords(const std::vector<Symbol>& alphabet, size_t maxDepth,
                                       size_t maxWidth);
// rooted ones only
std::vector<NestedWord> enumerateTrees(const std::vector<Symbol>& alphabet, size_t maxDepth,
                                       size_t maxWidth);

struct RandomGameParams {
  size_t states = 3;     // target automaton states before completion
  size_t alphabet = 3;
  size_t functions = 1;
  size_t maxWords = 2;   // replacement words per function
  size_t maxWordLen = 4; // tags per replacement word
  size_t maxWordDepth = 2;
};

Game randomFiniteGame(const RandomGameParams& p, uint64_t seed);

Dnwa randomDnwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states);
Nwa randomNwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states);
Anwa randomAnwa(Rng& rng, const std::vector<Symbol>& alphabet, size_t states);
// lift of a random grammar-backed validation automaton
Sanwa randomSanwa(uint64_t seed);

Dre randomDre(Rng& rng, const std::vector<Symbol>& alphabet, size_t depth);

struct RandomGrammarParams {
  size_t types = 3;   // at most
  size_t labels = 2;  // drawn from a, b, ...
  size_t dreDepth = 2;
};

// single-type by construction, deterministic content models
TreeGrammar randomGrammar(const RandomGrammarParams& p, uint64_t seed);

ValidationGame randomValidationGame(uint64_t seed);
InsertionGame randomInsertionGame(uint64_t seed);

// reference fixtures used across the test suite
Game makeG0();
NestedWord makeW0();
Game makeTwoStageGame();

// Independent effect oracle: enumerates Juliet strategies on w read from q,
// collecting the sets of final states Romeo can steer a strategy into.
// depthCap bounds the replacement context exactly like Bounded replay;
// ExplosionGuard when the play tree exceeds the internal budget.
Antichain bruteForceEffect(const Game& g, const NestedWord& w, const std::string& q,
                           size_t depthCap);

}  // namespace axml
